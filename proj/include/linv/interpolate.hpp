#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "linv/logic.hpp"
#include "linv/solver.hpp"

namespace linv {

class InputSatisfiable : public Error
{
 public:
  using Error::Error;
};

class DnfBlowup : public Error
{
 public:
  using Error::Error;
};

// Raised when integer branching inside a cube exceeds its budget.
class InterpolationIncomplete : public Error
{
 public:
  using Error::Error;
};

struct InterpolationOptions
{
  std::size_t dnf_cap = 4096;  // satisfiable cubes per side
  // Optional external interpolating prover; its answers are still
  // contract-checked with the solver.
  std::vector<std::string> external_command;
};

// A and B are conjunctions of literals. Variables in `ints` range over the
// integers.
Formula cube_interpolant(const std::vector<Formula>& a, const std::vector<Formula>& b,
                         const IntegerVars& ints = {});

Formula binary_interpolant(const Formula& a, const Formula& b, Solver& solver,
                           const InterpolationOptions& opts = {});

// [lambda_0 = True, ..., lambda_m = False] for theta_1..theta_m, checked
// against the inductive interpolant conditions before returning.
std::vector<Formula> sequence_interpolant(const std::vector<Formula>& seq, Solver& solver,
                                          const InterpolationOptions& opts = {});

// A conjunction of literals of f, true under nu, that implies f. nu must
// satisfy f.
std::vector<Formula> implicant(const Formula& f, const Valuation& nu);

}  // namespace linv
