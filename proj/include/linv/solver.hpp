#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "linv/atom.hpp"
#include "linv/logic.hpp"

namespace linv {

class Timeout : public Error
{
 public:
  using Error::Error;
};

class SolverFailure : public Error
{
 public:
  using Error::Error;
};

using Clock = std::chrono::steady_clock;

struct SolverConfig
{
  enum class Backend
  {
    Builtin,
    External
  };

  Backend backend = Backend::Builtin;
  // Shell-free argv template for the external backend. An argument "{}"
  // is replaced by the path of a script file; without one the script is
  // written to standard input.
  std::vector<std::string> command;
  std::chrono::milliseconds time_limit{30000};
  // Variables ranging over the integers rather than the rationals.
  IntegerVars integers;
};

struct SatResult
{
  bool sat = false;
  Valuation model;  // every free variable of the query
};

struct ValidityResult
{
  bool valid = false;
  Valuation counterexample;
};

class Solver
{
 public:
  explicit Solver(SolverConfig cfg = {});

  SatResult check_sat(const Formula& f);
  ValidityResult check_valid(const Formula& f);
  bool is_sat(const Formula& f) { return check_sat(f).sat; }
  bool is_valid(const Formula& f) { return check_valid(f).valid; }

  // Queries fail with Timeout past this point, whatever the per-query limit.
  void set_deadline(std::optional<Clock::time_point> d) { deadline_ = d; }
  std::optional<Clock::time_point> deadline() const { return deadline_; }

  const SolverConfig& config() const { return cfg_; }
  std::size_t queries() const { return queries_; }

  // When enabled, every check_sat input is kept for later replay.
  void set_logging(bool on) { logging_ = on; }
  const std::vector<Formula>& log() const { return log_; }

 private:
  Clock::time_point query_deadline() const;

  SolverConfig cfg_;
  std::optional<Clock::time_point> deadline_;
  std::size_t queries_ = 0;
  bool logging_ = false;
  std::vector<Formula> log_;
};

// The builtin decision procedure, usable without a Solver.
SatResult builtin_check_sat(const Formula& f, Clock::time_point deadline,
                            const IntegerVars& integers = {});

}  // namespace linv
