#include <gtest/gtest.h>

#include "linv/abstraction.hpp"
#include "linv/frontend.hpp"
#include "oracles.hpp"

namespace linv {
namespace {

Term v(const char* n) { return Term::var(n); }
Term c(int k) { return Term::constant(Rational(k)); }

Atom atom(const Formula& f)
{
  auto lit = Atom::literal_of(f);
  EXPECT_TRUE(lit && lit->second);
  return lit->first;
}

// P = {n >= 0, x = n, y = n}
PredicateSet intro_predicates()
{
  return PredicateSet({atom(Formula::mk_le(c(0), v("n"))), atom(Formula::mk_eq(v("x"), v("n"))),
                       atom(Formula::mk_eq(v("y"), v("n")))});
}

BoolFormula b(std::size_t i) { return Formula::bool_var(indicator(i)); }

TEST(Abstraction, GammaReplacesIndicators)
{
  PredicateSet p = intro_predicates();
  Formula g = gamma(Formula::mk_and(b(0), Formula::mk_not(b(1))), p);
  EXPECT_EQ(g, Formula::mk_and(p[0].to_formula(), Formula::mk_not(p[1].to_formula())));
  EXPECT_TRUE(gamma(Formula::truth(), p).is_true());
  PredicateSet y0({atom(Formula::mk_eq(v("y"), c(0)))});
  EXPECT_EQ(gamma(b(0), y0), Formula::mk_eq(v("y"), c(0)));
}

TEST(Abstraction, AlphaStar)
{
  PredicateSet p = intro_predicates();
  Valuation nu;
  for (const char* n : {"n", "x", "y"}) nu.set(Var(n), Rational(1));
  EXPECT_EQ(alpha_star(nu, p), (AbstractValuation{true, true, true}));
  PredicateSet y0({atom(Formula::mk_eq(v("y"), c(0)))});
  Valuation nu1;
  nu1.set(Var("x"), Rational(0));
  nu1.set(Var("y"), Rational(1));
  EXPECT_EQ(alpha_star(nu1, y0), AbstractValuation{false});
  EXPECT_TRUE(alpha_star(nu1, PredicateSet()).empty());
}

TEST(Abstraction, GammaStar)
{
  PredicateSet p = intro_predicates();
  Formula g = gamma_star({true, true, false}, p);
  EXPECT_EQ(g, Formula::mk_and({p[0].to_formula(), p[1].to_formula(), Formula::mk_not(p[2].to_formula())}));
  PredicateSet y0({atom(Formula::mk_eq(v("y"), c(0)))});
  EXPECT_EQ(gamma_star({false}, y0), Formula::mk_not(Formula::mk_eq(v("y"), c(0))));
  EXPECT_TRUE(gamma_star({}, PredicateSet()).is_true());
}

TEST(Abstraction, AlphaExamples)
{
  PredicateSet p = intro_predicates();
  Solver s;
  // x != y rules out exactly the monomials with both x = n and y = n.
  BoolFormula a = alpha(Formula::mk_not(Formula::mk_eq(v("x"), v("y"))), p, s);
  int count = 0;
  for (unsigned m = 0; m < 8; ++m) {
    AbstractValuation mu{(m & 1) != 0, (m & 2) != 0, (m & 4) != 0};
    bool expected = !(mu[1] && mu[2]);
    EXPECT_EQ(satisfies(mu, a), expected) << to_string(mu);
    count += expected;
  }
  EXPECT_EQ(count, 6);
  EXPECT_TRUE(alpha(Formula::falsity(), p, s).is_false());
  PredicateSet gt({atom(Formula::mk_lt(c(0), v("x")))});
  BoolFormula t = alpha(Formula::truth(), gt, s);
  EXPECT_TRUE(satisfies({true}, t));
  EXPECT_TRUE(satisfies({false}, t));
}

TEST(Abstraction, AlphaGuard)
{
  std::vector<Atom> atoms;
  for (int k = 0; k < 17; ++k) atoms.push_back(atom(Formula::mk_le(v("x"), c(k))));
  PredicateSet p(atoms);
  Solver s;
  EXPECT_THROW(alpha(Formula::truth(), p, s), Timeout);
}

TEST(PredicateSet, DeduplicatesAndKeepsOrder)
{
  PredicateSet p;
  Atom a = atom(Formula::mk_le(v("x"), v("y")));
  EXPECT_TRUE(p.add(a));
  EXPECT_FALSE(p.add(atom(Formula::mk_le(Term::scale(Rational(2), v("x")), Term::scale(Rational(2), v("y"))))));
  EXPECT_FALSE(p.add(a.complement()));
  EXPECT_TRUE(p.add(atom(Formula::mk_eq(v("y"), c(0)))));
  EXPECT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0], a);
}

TEST(AbstractionLaws, RandomInstances)
{
  testing::Gen g(41, {"x", "y", "z"}, {});
  Solver s;
  int implied = 0;
  for (int k = 0; k < 600; ++k) ASSERT_EQ(testing::check_lemmas(testing::lemma_instance(g), s, &implied), std::nullopt);
  EXPECT_GT(implied, 100);
}

}  // namespace
}  // namespace linv
