#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "linv/abstraction.hpp"
#include "linv/frontend.hpp"
#include "linv/learner.hpp"
#include "linv/solver.hpp"

namespace linv {

// Two answers for the same abstract valuation disagree.
class Conflict : public Error
{
 public:
  using Error::Error;
};

class ExcessiveRandomAnswers : public Error
{
 public:
  explicit ExcessiveRandomAnswers(Formula theta)
      : Error("too many random answers for " + to_string(theta)), theta_(std::move(theta))
  {
  }
  const Formula& conjecture() const { return theta_; }

 private:
  Formula theta_;
};

enum class Direction
{
  Positive,
  Negative
};

struct Witness
{
  Valuation nu;  // over the program variables
  Direction direction;
  std::string source;
};

enum class Provenance
{
  Derived,
  Random
};

struct CachedAnswer
{
  bool value;
  Provenance provenance;
};

struct ConflictEvidence
{
  bool concrete = false;  // otherwise only random answers disagree
  Valuation nu;
  Valuation nu_prime;
};

struct InvariantCheck
{
  bool holds = false;
  int failed_clause = 0;  // 1 initiation, 2 exit, 3 consecution
  Valuation counterexample;
};

// ceil(1.3^n)
std::uint64_t random_answer_threshold(std::size_t n);

class Teacher
{
 public:
  Teacher(const AnnotatedLoop& loop, Solver& solver, std::mt19937_64& rng, FreshNames& names);

  // Installs P and clears the counterexamples, the cache and the random
  // answer counter.
  void reset(const PredicateSet& p);
  // New learner session over the same predicates: only the answer cache is
  // dropped; witnesses and the random-answer count carry over.
  void restart();

  bool resolve_membership(const AbstractValuation& mu);
  // Yes, or an abstract counterexample.
  Answer resolve_equivalence(const BoolFormula& beta);
  Answer resolve(const Query& q);

  InvariantCheck check_invariant(const Formula& theta);
  ConflictEvidence find_conflict_pair() const;

  const Formula& under() const { return under_; }
  const Formula& over() const { return over_; }
  const PredicateSet& predicates() const { return p_; }
  const std::vector<Witness>& witnesses() const { return cex_; }
  const std::map<AbstractValuation, CachedAnswer>& cache() const { return cache_; }
  std::uint64_t random_answers() const { return r_; }
  std::uint64_t threshold() const { return tau_; }

 private:
  Valuation program_state(const Valuation& model) const;
  Valuation generic_witness(const Formula& f, const Valuation& model);
  void record(const Valuation& nu, Direction d, const std::string& source);
  void remember(const AbstractValuation& mu, bool value, Provenance prov);
  std::optional<AbstractValuation> random_counterexample(const BoolFormula& beta);

  const AnnotatedLoop& loop_;
  Solver& solver_;
  std::mt19937_64& rng_;
  FreshNames& names_;
  Formula under_;
  Formula over_;
  Formula pre_over_;  // Pre(over : body)
  PredicateSet p_;
  std::vector<Witness> cex_;
  std::map<AbstractValuation, CachedAnswer> cache_;
  std::uint64_t r_ = 0;
  std::uint64_t tau_ = 1;
};

}  // namespace linv
