#include <gtest/gtest.h>

#include "linv/predgen.hpp"
#include "support.hpp"

namespace linv {
namespace {

using testing::Gen;

Term v(const char* n) { return Term::var(n); }
Term vi(const char* n, unsigned k) { return Term::var(Var(n, k)); }
Term c(int k) { return Term::constant(Rational(k)); }

Atom atom(const AnnotatedLoop& loop, const std::string& text)
{
  auto lit = Atom::literal_of(parse_formula(text, loop));
  EXPECT_TRUE(lit && lit->second) << text;
  return lit->first;
}

void expect_normalized(const PredicateBatch& batch)
{
  for (const auto& a : batch.atoms) {
    for (const auto& x : vars_of(a.to_formula()).all()) {
      EXPECT_FALSE(x.index.has_value()) << a.to_string();
      EXPECT_FALSE(x.is_fresh()) << a.to_string();
    }
    auto again = Atom::literal_of(a.to_formula());
    ASSERT_TRUE(again);
    EXPECT_TRUE(again->second);
    EXPECT_EQ(again->first, a);
  }
  PredicateSet p;
  std::size_t added = p.add_all(batch.atoms);
  EXPECT_EQ(p.add_all(batch.atoms), 0u);
  EXPECT_LE(added, batch.atoms.size());
}

TEST(Desuperscript, KeepsUniformIndices)
{
  std::vector<Formula> lambda{
      Formula::truth(),
      Formula::mk_and(Formula::mk_le(vi("x", 1), vi("y", 1)), Formula::mk_le(vi("x", 0), vi("y", 1))),
      Formula::mk_or(Formula::mk_lt(c(0), vi("z", 2)), Formula::mk_eq(Term::var(Var("x!t3", 2)), c(0))),
      Formula::falsity()};
  auto atoms = desuperscripted_atoms(lambda);
  std::set<Atom> expected{Atom::literal_of(Formula::mk_le(v("x"), v("y")))->first,
                          Atom::literal_of(Formula::mk_lt(c(0), v("z")))->first};
  EXPECT_EQ(atoms, expected);
}

TEST(Initial, CorpusBatchesAreNormalized)
{
  for (const auto& name : testing::corpus_names()) {
    AnnotatedLoop loop = testing::corpus_loop(name);
    Solver s(SolverConfig{.integers = loop.integer_vars()});
    PredicateBatch batch = initial_predicates(loop, s);
    EXPECT_EQ(batch.origin, Origin::Initial);
    EXPECT_FALSE(batch.atoms.empty()) << name;
    expect_normalized(batch);
  }
}

TEST(Initial, IntroSeparatesTheApproximations)
{
  AnnotatedLoop loop = testing::corpus_loop("intro");
  Solver s(SolverConfig{.integers = loop.integer_vars()});
  PredicateSet p;
  p.add_all(initial_predicates(loop, s).atoms);
  // Some Boolean combination of P lies between the approximations: the
  // disjunction of the cells meeting the under-approximation.
  std::vector<Formula> cells;
  for (unsigned m = 0; m < (1u << p.size()); ++m) {
    AbstractValuation mu;
    for (std::size_t i = 0; i < p.size(); ++i) mu.push_back(((m >> i) & 1) != 0);
    Formula g = gamma_star(mu, p);
    if (s.is_sat(Formula::mk_and(g, loop.under_approximation()))) cells.push_back(g);
  }
  Formula hull = Formula::mk_or(cells);
  EXPECT_TRUE(s.is_valid(Formula::mk_implies(hull, loop.over_approximation())));
}

TEST(Initial, ImpossibleLoopRaises)
{
  AnnotatedLoop loop = parse_loop_file(std::string(LINV_TEST_DATA_DIR) + "/impossible.loop");
  Solver s;
  EXPECT_THROW(initial_predicates(loop, s), NoInvariantPossible);
}

// The gate fires exactly when some state is under but not over.
TEST(Initial, GateMatchesSolver)
{
  Gen g(51, {"x", "y"}, {});
  Solver s;
  int raised = 0, passed = 0;
  for (int k = 0; k < 150; ++k) {
    AnnotatedLoop loop = parse_loop("rat x, y; pre { true } while (x < y) { x := x + 1; } post { true }");
    loop.pre = g.formula(1);
    loop.guard = g.formula(1);
    loop.post = g.formula(1);
    bool expected = s.is_sat(Formula::mk_and(loop.under_approximation(), Formula::mk_not(loop.over_approximation())));
    try {
      expect_normalized(initial_predicates(loop, s));
      EXPECT_FALSE(expected);
      ++passed;
    } catch (const NoInvariantPossible&) {
      EXPECT_TRUE(expected);
      ++raised;
    }
  }
  EXPECT_GT(raised, 0);
  EXPECT_GT(passed, 0);
}

TEST(Conjecture, IntroCandidate)
{
  AnnotatedLoop loop = testing::corpus_loop("intro");
  Solver s(SolverConfig{.integers = loop.integer_vars()});
  FreshNames names;
  PredicateBatch batch = predicates_from_conjecture(parse_formula("x = y", loop), loop, s, names);
  EXPECT_EQ(batch.origin, Origin::Conjecture);
  EXPECT_FALSE(batch.atoms.empty());
  expect_normalized(batch);
}

TEST(Conjecture, PreconditionEnforced)
{
  AnnotatedLoop loop = testing::corpus_loop("intro");
  Solver s(SolverConfig{.integers = loop.integer_vars()});
  FreshNames names;
  EXPECT_THROW(predicates_from_conjecture(Formula::truth(), loop, s, names), PreconditionViolated);
}

TEST(Conflict, WalkthroughPair)
{
  AnnotatedLoop loop = testing::corpus_loop("intro");
  Solver s(SolverConfig{.integers = loop.integer_vars()});
  PredicateSet p({atom(loop, "y = 0")});
  Valuation nu, nu_prime;
  for (const char* n : {"n", "x", "y"}) nu.set(Var(n), Rational(1));
  nu_prime.set(Var("n"), Rational(0));
  nu_prime.set(Var("x"), Rational(0));
  nu_prime.set(Var("y"), Rational(1));
  PredicateBatch batch = predicates_from_conflict(nu, nu_prime, p, s);
  EXPECT_EQ(batch.origin, Origin::Conflict);
  expect_normalized(batch);
  std::size_t before = p.size();
  p.add_all(batch.atoms);
  EXPECT_GT(p.size(), before);
  EXPECT_NE(alpha_star(nu, p), alpha_star(nu_prime, p));
  EXPECT_THROW(predicates_from_conflict(nu, nu, p, s), PreconditionViolated);
}

// New predicates always tell the two valuations apart.
TEST(Conflict, RandomPairsBecomeSeparated)
{
  Gen g(52, {"x", "y", "z"}, {});
  const std::vector<Rational> grid{Rational(-1), Rational(0), Rational(1), Rational(2)};
  Solver s;
  int checked = 0;
  for (int k = 0; k < 2000 && checked < 100; ++k) {
    PredicateSet p;
    for (int i = 0; i < 2; ++i) {
      auto lit = Atom::literal_of(g.atom());
      if (lit) p.add(lit->first);
    }
    Valuation nu = g.valuation(grid), nu_prime = g.valuation(grid);
    if (nu == nu_prime || alpha_star(nu, p) != alpha_star(nu_prime, p)) continue;
    ++checked;
    PredicateBatch batch = predicates_from_conflict(nu, nu_prime, p, s);
    expect_normalized(batch);
    std::size_t before = p.size();
    p.add_all(batch.atoms);
    ASSERT_GE(p.size(), before);
    ASSERT_NE(alpha_star(nu, p), alpha_star(nu_prime, p)) << nu.to_string() << " " << nu_prime.to_string();
  }
  EXPECT_EQ(checked, 100);
}

}  // namespace
}  // namespace linv
