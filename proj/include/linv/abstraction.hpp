#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "linv/atom.hpp"
#include "linv/logic.hpp"
#include "linv/solver.hpp"

namespace linv {

// mu: B_P -> B, indexed in predicate order.
using AbstractValuation = std::vector<bool>;

std::string to_string(const AbstractValuation& mu);  // bit string, P order

// Boolean formulas over B_P are ordinary formulas whose Boolean variables
// are the indicator variables b!i.
using BoolFormula = Formula;

Var indicator(std::size_t i);
std::optional<std::size_t> indicator_index(const Var& v);

// Ordered set of distinct normalized atoms. An inequality whose complement
// is already present is not added again: its indicator would be the
// negation of an existing one.
class PredicateSet
{
 public:
  PredicateSet() = default;
  explicit PredicateSet(const std::vector<Atom>& atoms);

  bool add(const Atom& a);
  std::size_t add_all(const std::set<Atom>& atoms);

  bool contains(const Atom& a) const;
  std::size_t size() const { return atoms_.size(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }
  const std::vector<Atom>& atoms() const { return atoms_; }

 private:
  std::vector<Atom> atoms_;
  std::set<Atom> index_;
};

Valuation as_valuation(const AbstractValuation& mu);
bool satisfies(const AbstractValuation& mu, const BoolFormula& beta);

// Canonical monomial of mu: every indicator exactly once.
BoolFormula monomial(const AbstractValuation& mu);

Formula gamma(const BoolFormula& beta, const PredicateSet& p);
Formula gamma_star(const AbstractValuation& mu, const PredicateSet& p);
AbstractValuation alpha_star(const Valuation& nu, const PredicateSet& p);
// Disjunction of the canonical monomials consistent with theta. Limited to
// 16 predicates (Timeout beyond).
BoolFormula alpha(const Formula& theta, const PredicateSet& p, Solver& solver);

}  // namespace linv
