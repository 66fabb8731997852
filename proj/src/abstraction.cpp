#include "linv/abstraction.hpp"

namespace linv {

std::string to_string(const AbstractValuation& mu)
{
  std::string s;
  for (bool b : mu) s += b ? '1' : '0';
  return s;
}

Var indicator(std::size_t i) { return Var("b!" + std::to_string(i)); }

std::optional<std::size_t> indicator_index(const Var& v)
{
  if (v.index || v.name.size() < 3 || v.name.compare(0, 2, "b!") != 0) return std::nullopt;
  std::size_t k = 0;
  for (std::size_t i = 2; i < v.name.size(); ++i) {
    char c = v.name[i];
    if (c < '0' || c > '9') return std::nullopt;
    k = k * 10 + static_cast<std::size_t>(c - '0');
  }
  return k;
}

PredicateSet::PredicateSet(const std::vector<Atom>& atoms)
{
  for (const auto& a : atoms) add(a);
}

bool PredicateSet::contains(const Atom& a) const
{
  if (index_.count(a)) return true;
  if (a.is_boolean() || a.relation() == Relation::Eq) return false;
  return index_.count(a.complement()) != 0;
}

bool PredicateSet::add(const Atom& a)
{
  if (contains(a)) return false;
  atoms_.push_back(a);
  index_.insert(a);
  return true;
}

std::size_t PredicateSet::add_all(const std::set<Atom>& atoms)
{
  std::size_t n = 0;
  for (const auto& a : atoms) n += add(a) ? 1 : 0;
  return n;
}

Valuation as_valuation(const AbstractValuation& mu)
{
  Valuation v;
  for (std::size_t i = 0; i < mu.size(); ++i) v.set(indicator(i), static_cast<bool>(mu[i]));
  return v;
}

bool satisfies(const AbstractValuation& mu, const BoolFormula& beta) { return evaluate(beta, as_valuation(mu)); }

BoolFormula monomial(const AbstractValuation& mu)
{
  std::vector<Formula> lits;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    Formula b = Formula::bool_var(indicator(i));
    lits.push_back(mu[i] ? b : Formula::mk_not(b));
  }
  return Formula::mk_and(std::move(lits));
}

Formula gamma(const BoolFormula& beta, const PredicateSet& p)
{
  Substitution sigma;
  for (const auto& v : vars_of(beta).boolean) {
    auto i = indicator_index(v);
    if (!i || *i >= p.size()) throw TypeError("not an indicator of the predicate set: " + v.to_string());
    sigma.emplace(v, p[*i].to_formula());
  }
  return substitute(beta, sigma);
}

Formula gamma_star(const AbstractValuation& mu, const PredicateSet& p)
{
  if (mu.size() != p.size()) throw Error("abstract valuation does not match the predicate set");
  std::vector<Formula> lits;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    Formula a = p[i].to_formula();
    lits.push_back(mu[i] ? a : Formula::mk_not(a));
  }
  return Formula::mk_and(std::move(lits));
}

AbstractValuation alpha_star(const Valuation& nu, const PredicateSet& p)
{
  AbstractValuation mu(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mu[i] = p[i].holds(nu);
  return mu;
}

BoolFormula alpha(const Formula& theta, const PredicateSet& p, Solver& solver)
{
  if (p.size() > 16) throw Timeout("alpha is limited to 16 predicates");
  std::vector<Formula> disjuncts;
  std::size_t n = p.size();
  for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
    AbstractValuation mu(n);
    for (std::size_t i = 0; i < n; ++i) mu[i] = (bits >> (n - 1 - i)) & 1;
    if (solver.is_sat(Formula::mk_and(theta, gamma_star(mu, p)))) disjuncts.push_back(monomial(mu));
  }
  return Formula::mk_or(std::move(disjuncts));
}

}  // namespace linv
