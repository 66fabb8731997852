#pragma once

#include <random>
#include <string>
#include <vector>

#include "linv/frontend.hpp"
#include "linv/logic.hpp"

namespace linv::testing {

inline std::string corpus(const std::string& name) { return std::string(LINV_CORPUS_DIR) + "/" + name; }

inline AnnotatedLoop corpus_loop(const std::string& name) { return parse_loop_file(corpus(name + ".loop")); }

inline const std::vector<std::string>& corpus_names()
{
  static const std::vector<std::string> names{"intro", "tar", "parser", "ide_wait_ireason"};
  return names;
}

// Small random terms and formulas over a fixed vocabulary.
class Gen
{
 public:
  explicit Gen(std::uint64_t seed, std::vector<std::string> rats = {"x", "y", "z"},
               std::vector<std::string> bools = {"p"})
      : rng_(seed), rats_(std::move(rats)), bools_(std::move(bools))
  {
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool coin() { return pick(2) == 1; }
  std::mt19937_64& rng() { return rng_; }

  Rational constant()
  {
    static const Rational values[] = {Rational(-1), Rational(0), Rational(1), Rational(2), Rational(1, 2)};
    return values[pick(5)];
  }

  Term var() { return Term::var(rats_[static_cast<std::size_t>(pick(static_cast<int>(rats_.size())))]); }

  Term term(int depth = 2)
  {
    if (depth == 0 || pick(3) == 0) return coin() ? var() : Term::constant(constant());
    switch (pick(3)) {
      case 0: return term(depth - 1) + term(depth - 1);
      case 1: return term(depth - 1) - term(depth - 1);
      default: return Term::scale(Rational(pick(3) + 1), term(depth - 1));
    }
  }

  Formula atom()
  {
    if (!bools_.empty() && pick(5) == 0)
      return Formula::bool_var(bools_[static_cast<std::size_t>(pick(static_cast<int>(bools_.size())))]);
    Term a = term(1), b = term(1);
    switch (pick(3)) {
      case 0: return Formula::mk_lt(a, b);
      case 1: return Formula::mk_le(a, b);
      default: return Formula::mk_eq(a, b);
    }
  }

  Formula formula(int depth = 2)
  {
    if (depth == 0 || pick(4) == 0) return atom();
    switch (pick(3)) {
      case 0: return Formula::mk_not(formula(depth - 1));
      case 1: return Formula::mk_and(formula(depth - 1), formula(depth - 1));
      default: return Formula::mk_or(formula(depth - 1), formula(depth - 1));
    }
  }

  // Literals over the rational variables only.
  std::vector<Formula> cube(std::size_t n)
  {
    std::vector<Formula> out;
    for (std::size_t i = 0; i < n; ++i) {
      Formula a = Formula::mk_le(term(1), term(1));
      if (pick(3) == 0) a = Formula::mk_eq(term(1), term(1));
      if (pick(3) == 0) a = Formula::mk_lt(term(1), term(1));
      out.push_back(coin() ? a : Formula::mk_not(a));
    }
    return out;
  }

  Valuation valuation(const std::vector<Rational>& grid)
  {
    Valuation nu;
    for (const auto& r : rats_) nu.set(Var(r), grid[static_cast<std::size_t>(pick(static_cast<int>(grid.size())))]);
    for (const auto& b : bools_) nu.set(Var(b), coin());
    return nu;
  }

  const std::vector<std::string>& rats() const { return rats_; }
  const std::vector<std::string>& bools() const { return bools_; }

 private:
  std::mt19937_64 rng_;
  std::vector<std::string> rats_;
  std::vector<std::string> bools_;
};

// Every assignment of the grid to the variables.
inline std::vector<Valuation> all_valuations(const std::vector<std::string>& rats,
                                             const std::vector<std::string>& bools,
                                             const std::vector<Rational>& grid)
{
  std::vector<Valuation> out{Valuation{}};
  for (const auto& r : rats) {
    std::vector<Valuation> next;
    for (const auto& nu : out)
      for (const auto& q : grid) {
        Valuation w = nu;
        w.set(Var(r), q);
        next.push_back(std::move(w));
      }
    out = std::move(next);
  }
  for (const auto& b : bools) {
    std::vector<Valuation> next;
    for (const auto& nu : out)
      for (bool v : {false, true}) {
        Valuation w = nu;
        w.set(Var(b), v);
        next.push_back(std::move(w));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace linv::testing
