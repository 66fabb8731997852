#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "linv/frontend.hpp"
#include "linv/interpolate.hpp"
#include "linv/solver.hpp"

namespace linv {

struct EngineConfig
{
  std::uint64_t seed = 0;
  std::size_t max_restarts = 100000;
  std::chrono::milliseconds timeout{60000};
  SolverConfig solver;
  InterpolationOptions interpolation;
  std::ostream* trace = nullptr;  // query/answer log, one record per line
};

enum class Outcome
{
  Invariant,
  Timeout,
  NoInvariantPossible
};

const char* outcome_name(Outcome o);

struct InferenceStats
{
  std::size_t predicates = 0;
  std::size_t membership_queries = 0;
  std::size_t equivalence_queries = 0;
  std::size_t restarts = 0;
  std::size_t initial_batches = 0;
  std::size_t conjecture_batches = 0;
  std::size_t conflict_batches = 0;
  std::int64_t time_ms = 0;
};

struct InferenceResult
{
  Outcome outcome = Outcome::Timeout;
  std::optional<Formula> invariant;
  std::vector<Atom> predicates;  // final P, in order
  InferenceStats stats;
  std::string note;  // why the run stopped without an invariant
};

InferenceResult infer(const AnnotatedLoop& loop, const EngineConfig& cfg);

// Checks the three invariant conditions with a fresh solver, unrolling
// the body through its transition formula rather than preconditions.
bool verify_invariant(const AnnotatedLoop& loop, const Formula& theta, const SolverConfig& cfg = {});

std::string stats_json(const std::string& example, const InferenceResult& r);

struct CorpusEntry
{
  std::string example;
  std::string error;  // parse error; no runs then
  std::vector<InferenceResult> runs;
};

// Runs every file `runs` times with seeds cfg.seed, cfg.seed + 1, ...
// Files run in parallel, each with its own engine.
std::vector<CorpusEntry> run_corpus(const std::vector<std::string>& paths, const EngineConfig& cfg,
                                    std::size_t runs);

std::string corpus_table(const std::vector<CorpusEntry>& entries);

}  // namespace linv
