#include "linv/predgen.hpp"

namespace linv {

std::set<Atom> desuperscripted_atoms(const std::vector<Formula>& lambda)
{
  std::set<Atom> out;
  for (const auto& l : lambda)
    for (const auto& a : atoms_of(l)) {
      std::set<Var> vs = vars_of(a.to_formula()).all();
      std::optional<unsigned> k = vs.begin()->index;
      bool uniform = k.has_value();
      for (const auto& v : vs) uniform = uniform && v.index == k && !v.is_fresh();
      if (!uniform) continue;
      auto lit = Atom::literal_of(desuperscript(a.to_formula(), *k));
      if (lit) out.insert(lit->first);
    }
  return out;
}

PredicateBatch initial_predicates(const AnnotatedLoop& loop, Solver& solver, const InterpolationOptions& opts)
{
  Formula under = loop.under_approximation();
  Formula over = loop.over_approximation();
  if (!solver.is_valid(Formula::mk_implies(under, over)))
    throw NoInvariantPossible("the precondition or postcondition admits a state outside post || guard");
  return {atoms_of(binary_interpolant(under, Formula::mk_not(over), solver, opts)), Origin::Initial};
}

PredicateBatch predicates_from_conjecture(const Formula& theta, const AnnotatedLoop& loop, Solver& solver,
                                          FreshNames& names, const InterpolationOptions& opts)
{
  Formula under = loop.under_approximation();
  Formula over = loop.over_approximation();
  std::vector<Formula> xi = xi_sequence(Formula::mk_and(theta, loop.guard), loop, over, names);
  if (solver.is_sat(Formula::mk_and(xi)))
    throw PreconditionViolated("conjecture does not lead into post || guard after one iteration");
  PredicateBatch batch{desuperscripted_atoms(sequence_interpolant(xi, solver, opts)), Origin::Conjecture};

  Formula premise = Formula::mk_implies(Formula::mk_and(under, loop.guard), pre_condition(theta, loop.body, names));
  if (solver.is_valid(premise)) {
    std::vector<Formula> xi2 = xi_sequence(Formula::mk_and(under, loop.guard), loop, theta, names);
    for (const auto& a : desuperscripted_atoms(sequence_interpolant(xi2, solver, opts))) batch.atoms.insert(a);
  }
  return batch;
}

PredicateBatch predicates_from_conflict(const Valuation& nu, const Valuation& nu_prime, const PredicateSet& p,
                                        Solver& solver, const InterpolationOptions& opts)
{
  if (nu == nu_prime) throw PreconditionViolated("conflicting valuations are identical");
  AbstractValuation mu = alpha_star(nu, p);
  if (mu != alpha_star(nu_prime, p)) throw PreconditionViolated("conflicting valuations are abstracted differently");
  Formula x = gamma_of_valuation(nu);
  Formula x_prime = gamma_of_valuation(nu_prime);
  Formula rho = gamma_star(mu, p);
  Formula itp = binary_interpolant(x, Formula::mk_or(x_prime, Formula::mk_not(rho)), solver, opts);
  return {atoms_of(itp), Origin::Conflict};
}

}  // namespace linv
