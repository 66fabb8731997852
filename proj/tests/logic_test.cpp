#include <gtest/gtest.h>

#include "linv/atom.hpp"
#include "linv/logic.hpp"
#include "support.hpp"

namespace linv {
namespace {

using testing::Gen;

const std::vector<Rational> kGrid{Rational(-1), Rational(0), Rational(1), Rational(2)};

Term x() { return Term::var("x"); }
Term y() { return Term::var("y"); }
Term c(int k) { return Term::constant(Rational(k)); }

TEST(Formula, AndOrAreFlattenedAndFolded)
{
  Formula p = Formula::bool_var("p"), q = Formula::bool_var("q"), r = Formula::bool_var("r");
  Formula f = Formula::mk_and(p, Formula::mk_and(q, r));
  ASSERT_EQ(f.kind(), Formula::Kind::And);
  EXPECT_EQ(f.children().size(), 3u);
  EXPECT_EQ(Formula::mk_and(p, p), p);
  EXPECT_TRUE(Formula::mk_and(p, Formula::falsity()).is_false());
  EXPECT_EQ(Formula::mk_or(p, Formula::falsity()), p);
  EXPECT_TRUE(Formula::mk_or(p, Formula::truth()).is_true());
  EXPECT_TRUE(Formula::mk_and(std::vector<Formula>{}).is_true());
  EXPECT_TRUE(Formula::mk_or(std::vector<Formula>{}).is_false());
}

TEST(Formula, ConstantComparisonsFold)
{
  EXPECT_TRUE(Formula::mk_lt(c(1), c(2)).is_true());
  EXPECT_TRUE(Formula::mk_eq(c(1), c(2)).is_false());
  EXPECT_TRUE(Formula::mk_le(x() - x(), c(0)).is_true());
}

TEST(Formula, DoubleNegationCollapses)
{
  Formula p = Formula::bool_var("p");
  EXPECT_EQ(Formula::mk_not(Formula::mk_not(p)), p);
}

TEST(Evaluate, Basics)
{
  Valuation nu;
  nu.set(Var("x"), Rational(3));
  nu.set(Var("y"), Rational(1, 2));
  nu.set(Var("p"), true);
  EXPECT_EQ(evaluate(x() + Term::scale(Rational(2), y()), nu), Rational(4));
  EXPECT_TRUE(evaluate(Formula::mk_and(Formula::bool_var("p"), Formula::mk_lt(y(), x())), nu));
  EXPECT_FALSE(evaluate(Formula::mk_eq(x(), y()), nu));
  EXPECT_THROW(evaluate(Formula::mk_lt(Term::var("w"), x()), nu), EvalError);
}

TEST(Substitute, RejectsSortMismatch)
{
  Substitution s{{Var("p"), x()}};
  EXPECT_THROW(substitute(Formula::bool_var("p"), s), TypeError);
  Substitution t{{Var("x"), Formula::truth()}};
  EXPECT_THROW(substitute(Formula::mk_lt(x(), y()), t), TypeError);
}

TEST(Substitute, IsSimultaneous)
{
  Substitution s{{Var("x"), y()}, {Var("y"), x()}};
  EXPECT_EQ(substitute(Formula::mk_lt(x(), y()), s), Formula::mk_lt(y(), x()));
}

// evaluate(f[x := t], nu) == evaluate(f, nu[x := t(nu)])
TEST(Substitute, CommutesWithEvaluation)
{
  Gen g(11);
  auto valuations = testing::all_valuations({"x", "y", "z"}, {"p"}, kGrid);
  for (int i = 0; i < 200; ++i) {
    Formula f = g.formula(3);
    Term t = g.term(2);
    Formula p = g.formula(1);
    Substitution s{{Var("x"), t}, {Var("p"), p}};
    Formula fs = substitute(f, s);
    for (std::size_t k = 0; k < valuations.size(); k += 7) {
      const Valuation& nu = valuations[k];
      Valuation upd = nu;
      upd.set(Var("x"), evaluate(t, nu));
      upd.set(Var("p"), evaluate(p, nu));
      ASSERT_EQ(evaluate(fs, nu), evaluate(f, upd)) << to_string(f) << " with x := " << to_string(t);
    }
  }
}

TEST(Superscript, RoundTrips)
{
  Gen g(12);
  for (int i = 0; i < 200; ++i) {
    Formula f = g.formula(3);
    for (unsigned k : {0u, 1u, 5u}) ASSERT_EQ(desuperscript(superscript(f, k), k), f);
  }
}

TEST(Superscript, ShiftMovesIndices)
{
  Formula f = Formula::mk_lt(Term::var(Var("x", 0)), Term::var(Var("y", 1)));
  EXPECT_EQ(shift(f, 2), Formula::mk_lt(Term::var(Var("x", 2)), Term::var(Var("y", 3))));
  EXPECT_THROW(desuperscript(f, 0), IndexError);
}

TEST(Valuation, RestrictIndex)
{
  Valuation nu;
  nu.set(Var("x", 0), Rational(1));
  nu.set(Var("x", 1), Rational(2));
  nu.set(Var("p", 1), true);
  Valuation one = nu.restrict_index(1);
  EXPECT_EQ(one.size(), 2u);
  EXPECT_EQ(one.rat(Var("x")), Rational(2));
  EXPECT_TRUE(one.boolean(Var("p")));
}

TEST(Valuation, GammaPinsEveryVariable)
{
  Gen g(13);
  for (int i = 0; i < 50; ++i) {
    Valuation nu = g.valuation(kGrid);
    Formula gam = gamma_of_valuation(nu);
    EXPECT_TRUE(evaluate(gam, nu));
    Valuation other = nu;
    other.set(Var("y"), Rational(nu.rat(Var("y")) + 1));
    EXPECT_FALSE(evaluate(gam, other));
  }
}

TEST(Atom, NormalizationIsCanonical)
{
  // 2y >= 0 and y >= 0 are the same predicate.
  auto a = Atom::literal_of(Formula::mk_le(c(0), Term::scale(Rational(2), y())));
  auto b = Atom::literal_of(Formula::mk_le(c(0), y()));
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->first, b->first);
  auto e1 = Atom::literal_of(Formula::mk_eq(x(), y()));
  auto e2 = Atom::literal_of(Formula::mk_eq(y(), x()));
  EXPECT_EQ(e1->first, e2->first);
}

TEST(Atom, NormalizationIsIdempotentAndEquivalent)
{
  Gen g(14, {"x", "y", "z"}, {});
  auto valuations = testing::all_valuations({"x", "y", "z"}, {}, {Rational(-1), Rational(0), Rational(1, 2), Rational(2)});
  for (int i = 0; i < 300; ++i) {
    Formula f = g.atom();
    auto lit = Atom::literal_of(f);
    if (!lit) continue;
    Formula once = lit->first.to_formula();
    auto again = Atom::literal_of(once);
    ASSERT_TRUE(again);
    EXPECT_EQ(again->first, lit->first);
    EXPECT_TRUE(again->second);
    for (const auto& nu : valuations) {
      bool value = lit->second ? lit->first.holds(nu) : !lit->first.holds(nu);
      ASSERT_EQ(value, evaluate(f, nu)) << to_string(f);
    }
  }
}

TEST(Atom, NegatedInequalityTurnsAround)
{
  auto lit = Atom::literal_of(Formula::mk_not(Formula::mk_le(x(), y())));
  ASSERT_TRUE(lit);
  EXPECT_TRUE(lit->second);
  EXPECT_EQ(lit->first.relation(), Relation::Lt);
  EXPECT_EQ(lit->first.complement().complement(), lit->first);
}

TEST(Atom, RejectsConstants) { EXPECT_THROW(Atom::linear(LinearExpr{}, Relation::Le), Error); }

TEST(IntegerTightening, RoundsInward)
{
  IntegerVars ints({"x"});
  LinearExpr e;
  e.add_var(Var("x"), 2);
  e.constant = -3;  // 2x - 3 < 0, so x <= 1
  auto t = integer_tightened({e, Relation::Lt});
  ASSERT_TRUE(t);
  EXPECT_EQ(t->rel, Relation::Le);
  Valuation nu;
  nu.set(Var("x"), Rational(1));
  EXPECT_TRUE(t->holds(nu));
  nu.set(Var("x"), Rational(2));
  EXPECT_FALSE(t->holds(nu));
  LinearExpr odd;
  odd.add_var(Var("x"), 2);
  odd.constant = -1;  // 2x = 1
  EXPECT_FALSE(integer_tightened({odd, Relation::Eq}));
  EXPECT_TRUE(ints.contains(Var("x", 3)));
  EXPECT_TRUE(ints.contains(Var("x!t7")));
}

TEST(Printing, Readable)
{
  EXPECT_EQ(to_string(Formula::mk_and(Formula::mk_eq(x(), y()), Formula::mk_le(c(0), x() + y()))),
            "x = y && 0 <= x + y");
  EXPECT_EQ(rational_to_string(Rational(-3, 4)), "-3/4");
}

}  // namespace
}  // namespace linv
