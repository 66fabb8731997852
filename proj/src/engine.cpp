#include "linv/engine.hpp"

#include <algorithm>
#include <future>
#include <iomanip>
#include <random>
#include <sstream>

#include "json.hpp"
#include "linv/abstraction.hpp"
#include "linv/learner.hpp"
#include "linv/predgen.hpp"
#include "linv/teacher.hpp"

namespace linv {

const char* outcome_name(Outcome o)
{
  switch (o) {
    case Outcome::Invariant: return "invariant";
    case Outcome::Timeout: return "timeout";
    case Outcome::NoInvariantPossible: return "no_invariant_possible";
  }
  return "?";
}

bool verify_invariant(const AnnotatedLoop& loop, const Formula& theta, const SolverConfig& cfg)
{
  SolverConfig sc = cfg;
  sc.integers = loop.integer_vars();
  Solver solver(sc);
  if (!solver.is_valid(Formula::mk_implies(loop.pre, theta))) return false;
  if (!solver.is_valid(Formula::mk_implies(Formula::mk_and(theta, Formula::mk_not(loop.guard)), loop.post)))
    return false;
  FreshNames names;
  std::vector<Formula> path{superscript(theta, 0), superscript(loop.guard, 0)};
  for (std::size_t i = 0; i < loop.body.size(); ++i)
    path.push_back(shift(transition(loop.body[i], loop, names), static_cast<unsigned>(i)));
  Formula after = superscript(theta, static_cast<unsigned>(loop.body.size()));
  return solver.is_valid(Formula::mk_implies(Formula::mk_and(std::move(path)), after));
}

namespace {

class Run
{
 public:
  Run(const AnnotatedLoop& loop, const EngineConfig& cfg)
      : loop_(loop), cfg_(cfg), solver_(solver_config(loop, cfg)), rng_(cfg.seed), teacher_(loop, solver_, rng_, names_)
  {
  }

  InferenceResult go()
  {
    auto start = Clock::now();
    solver_.set_deadline(start + cfg_.timeout);
    try {
      merge(initial_predicates(loop_, solver_, cfg_.interpolation));
      while (!learn()) {
        if (result_.stats.restarts >= cfg_.max_restarts) {
          result_.note = "restart limit reached";
          break;
        }
        ++result_.stats.restarts;
      }
    } catch (const Timeout&) {
      result_.outcome = Outcome::Timeout;
      result_.note = "time limit reached";
    } catch (const NoInvariantPossible& e) {
      result_.outcome = Outcome::NoInvariantPossible;
      result_.note = e.what();
    }
    result_.predicates = p_.atoms();
    result_.stats.predicates = p_.size();
    result_.stats.time_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
    return result_;
  }

 private:
  static SolverConfig solver_config(const AnnotatedLoop& loop, const EngineConfig& cfg)
  {
    SolverConfig sc = cfg.solver;
    sc.integers = loop.integer_vars();
    return sc;
  }

  void trace(const std::string& line)
  {
    if (cfg_.trace) *cfg_.trace << line << '\n';
  }

  void merge(const PredicateBatch& b)
  {
    std::size_t added = p_.add_all(b.atoms);
    const char* origin = "initial";
    switch (b.origin) {
      case Origin::Initial: ++result_.stats.initial_batches; break;
      case Origin::Conjecture:
        ++result_.stats.conjecture_batches;
        origin = "conjecture";
        break;
      case Origin::Conflict:
        ++result_.stats.conflict_batches;
        origin = "conflict";
        break;
    }
    std::string line = std::string("PRED ") + origin + " +" + std::to_string(added) + " |P|=" + std::to_string(p_.size());
    for (const auto& a : b.atoms) line += " [" + a.to_string() + "]";
    trace(line);
  }

  // One learner session; true once an invariant is found.
  bool learn()
  {
    if (p_.size() != session_size_) {
      teacher_.reset(p_);
      session_size_ = p_.size();
    } else {
      teacher_.restart();
    }
    Learner learner(p_.size());
    std::optional<Formula> conjecture;
    bool conflict = false;
    try {
      while (!learner.done()) {
        const Query& q = learner.query();
        Answer a = teacher_.resolve(q);
        if (q.kind == Query::Kind::Membership) {
          ++result_.stats.membership_queries;
          trace("MEM " + to_string(q.mu) + (a.yes ? " YES" : " NO"));
        } else {
          ++result_.stats.equivalence_queries;
          trace("EQ " + to_string(gamma(q.beta, p_)) + (a.yes ? " YES" : " CEX " + to_string(a.counterexample)));
        }
        learner.answer(a);
      }
    } catch (const Conflict& e) {
      trace(std::string("CONFLICT ") + e.what());
      conflict = true;
    } catch (const LivelockDetected& e) {
      trace(std::string("LIVELOCK ") + e.what());
      conflict = true;
    } catch (const ExcessiveRandomAnswers& e) {
      trace("EXCESSIVE " + to_string(e.conjecture()));
      conjecture = e.conjecture();
    }

    if (learner.done()) {
      Formula theta = gamma(learner.result(), p_);
      if (!verify_invariant(loop_, theta, cfg_.solver))
        throw Error("internal error: teacher accepted a formula the verifier rejects: " + to_string(theta));
      result_.outcome = Outcome::Invariant;
      result_.invariant = theta;
      return true;
    }

    try {
      if (conflict) {
        ConflictEvidence ev = teacher_.find_conflict_pair();
        if (ev.concrete) {
          trace("PAIR " + ev.nu.to_string() + " " + ev.nu_prime.to_string());
          merge(predicates_from_conflict(ev.nu, ev.nu_prime, p_, solver_, cfg_.interpolation));
        }
      } else if (conjecture) {
        merge(predicates_from_conjecture(*conjecture, loop_, solver_, names_, cfg_.interpolation));
      }
    } catch (const InterpolationIncomplete& e) {
      trace(std::string("NOPRED ") + e.what());
    } catch (const DnfBlowup& e) {
      trace(std::string("NOPRED ") + e.what());
    }
    trace("RESTART");
    return false;
  }

  const AnnotatedLoop& loop_;
  const EngineConfig& cfg_;
  Solver solver_;
  std::mt19937_64 rng_;
  FreshNames names_;
  Teacher teacher_;
  PredicateSet p_;
  std::size_t session_size_ = static_cast<std::size_t>(-1);
  InferenceResult result_;
};

}  // namespace

InferenceResult infer(const AnnotatedLoop& loop, const EngineConfig& cfg)
{
  if (cfg.timeout.count() <= 0) throw Error("engine timeout must be positive");
  Run run(loop, cfg);
  return run.go();
}

std::string stats_json(const std::string& example, const InferenceResult& r)
{
  nlohmann::ordered_json j;
  j["example"] = example;
  j["outcome"] = outcome_name(r.outcome);
  j["invariant"] = r.invariant ? nlohmann::ordered_json(to_string(*r.invariant)) : nlohmann::ordered_json(nullptr);
  j["P"] = r.stats.predicates;
  j["MEM"] = r.stats.membership_queries;
  j["EQ"] = r.stats.equivalence_queries;
  j["RE"] = r.stats.restarts;
  j["time_ms"] = r.stats.time_ms;
  j["batches"] = {{"initial", r.stats.initial_batches},
                  {"conjecture", r.stats.conjecture_batches},
                  {"conflict", r.stats.conflict_batches}};
  return j.dump();
}

std::vector<CorpusEntry> run_corpus(const std::vector<std::string>& paths, const EngineConfig& cfg,
                                    std::size_t runs)
{
  std::vector<std::future<CorpusEntry>> jobs;
  for (const auto& path : paths) {
    jobs.push_back(std::async(std::launch::async, [path, cfg, runs] {
      CorpusEntry e;
      e.example = path;
      AnnotatedLoop loop;
      try {
        loop = parse_loop_file(path);
      } catch (const Error& err) {
        e.error = err.what();
        return e;
      }
      EngineConfig c = cfg;
      c.trace = nullptr;
      for (std::size_t k = 0; k < runs; ++k) {
        c.seed = cfg.seed + k;
        e.runs.push_back(infer(loop, c));
      }
      return e;
    }));
  }
  std::vector<CorpusEntry> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

std::string corpus_table(const std::vector<CorpusEntry>& entries)
{
  std::ostringstream os;
  os << std::left << std::setw(28) << "example" << std::right << std::setw(6) << "found" << std::setw(5) << "P"
     << std::setw(22) << "MEM mean/min/max" << std::setw(22) << "EQ mean/min/max" << std::setw(18)
     << "RE mean/min/max" << std::setw(24) << "ms mean/min/max" << '\n';
  auto triple = [](const std::vector<double>& xs) {
    std::ostringstream s;
    if (xs.empty()) return std::string("-");
    double sum = 0;
    for (double x : xs) sum += x;
    s << std::fixed << std::setprecision(1) << sum / static_cast<double>(xs.size()) << "/"
      << std::setprecision(0) << *std::min_element(xs.begin(), xs.end()) << "/"
      << *std::max_element(xs.begin(), xs.end());
    return s.str();
  };
  for (const auto& e : entries) {
    if (!e.error.empty()) {
      os << std::left << std::setw(28) << e.example << " error: " << e.error << '\n';
      continue;
    }
    std::vector<double> mem, eq, re, ms;
    std::size_t found = 0, p = 0;
    for (const auto& r : e.runs) {
      if (r.outcome == Outcome::Invariant) ++found;
      p = std::max(p, r.stats.predicates);
      mem.push_back(static_cast<double>(r.stats.membership_queries));
      eq.push_back(static_cast<double>(r.stats.equivalence_queries));
      re.push_back(static_cast<double>(r.stats.restarts));
      ms.push_back(static_cast<double>(r.stats.time_ms));
    }
    std::string name = e.example.substr(e.example.find_last_of('/') + 1);
    os << std::left << std::setw(28) << name << std::right << std::setw(6)
       << (std::to_string(found) + "/" + std::to_string(e.runs.size())) << std::setw(5) << p << std::setw(22)
       << triple(mem) << std::setw(22) << triple(eq) << std::setw(18) << triple(re) << std::setw(24) << triple(ms)
       << '\n';
  }
  return os.str();
}

}  // namespace linv
