#pragma once

#include <set>

#include "linv/abstraction.hpp"
#include "linv/frontend.hpp"
#include "linv/interpolate.hpp"
#include "linv/solver.hpp"

namespace linv {

class NoInvariantPossible : public Error
{
 public:
  using Error::Error;
};

class PreconditionViolated : public Error
{
 public:
  using Error::Error;
};

enum class Origin
{
  Initial,
  Conjecture,
  Conflict
};

struct PredicateBatch
{
  std::set<Atom> atoms;  // unindexed, normalized
  Origin origin;
};

// Atoms of an interpolant sequence with their time index removed. Atoms
// over fresh symbols or mixed indices are dropped.
std::set<Atom> desuperscripted_atoms(const std::vector<Formula>& lambda);

PredicateBatch initial_predicates(const AnnotatedLoop& loop, Solver& solver,
                                  const InterpolationOptions& opts = {});

PredicateBatch predicates_from_conjecture(const Formula& theta, const AnnotatedLoop& loop, Solver& solver,
                                          FreshNames& names, const InterpolationOptions& opts = {});

PredicateBatch predicates_from_conflict(const Valuation& nu, const Valuation& nu_prime, const PredicateSet& p,
                                        Solver& solver, const InterpolationOptions& opts = {});

}  // namespace linv
