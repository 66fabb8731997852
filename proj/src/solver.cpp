#include "linv/solver.hpp"

#include "linv/smtlib.hpp"

namespace linv {

Solver::Solver(SolverConfig cfg) : cfg_(std::move(cfg))
{
  if (cfg_.time_limit.count() <= 0) throw Error("solver time limit must be positive");
  if (cfg_.backend == SolverConfig::Backend::External && cfg_.command.empty())
    throw Error("external solver backend needs a command");
}

Clock::time_point Solver::query_deadline() const
{
  Clock::time_point d = Clock::now() + cfg_.time_limit;
  if (deadline_ && *deadline_ < d) d = *deadline_;
  return d;
}

SatResult Solver::check_sat(const Formula& f)
{
  ++queries_;
  if (logging_) log_.push_back(f);
  Clock::time_point d = query_deadline();
  if (Clock::now() >= d) throw Timeout("time limit reached");
  if (cfg_.backend == SolverConfig::Backend::External) return external_check_sat(f, cfg_.command, d, cfg_.integers);
  return builtin_check_sat(f, d, cfg_.integers);
}

ValidityResult Solver::check_valid(const Formula& f)
{
  SatResult r = check_sat(Formula::mk_not(f));
  return {!r.sat, std::move(r.model)};
}

}  // namespace linv
