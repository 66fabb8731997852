// One PASS/FAIL line per acceptance criterion; exit status 1 if any fail.

#include <chrono>
#include <iostream>
#include <random>

#include "linv/engine.hpp"
#include "linv/interpolate.hpp"
#include "linv/teacher.hpp"
#include "oracles.hpp"

namespace {

using namespace linv;
using testing::Violation;
using Seconds = std::chrono::duration<double>;

struct Run
{
  std::string loop;
  AnnotatedLoop program;
  InferenceResult result;
};

std::vector<Run> all_runs;

bool report(int n, bool ok, const std::string& detail)
{
  std::cout << (ok ? "PASS" : "FAIL") << " AC" << n << ": " << detail << std::endl;
  return ok;
}

Atom atom(const AnnotatedLoop& loop, const std::string& text)
{
  auto lit = Atom::literal_of(parse_formula(text, loop));
  if (!lit || !lit->second) throw Error("not an atom: " + text);
  return lit->first;
}

bool holds(const AnnotatedLoop& loop, const std::string& text)
{
  Solver solver(SolverConfig{.integers = loop.integer_vars()});
  std::mt19937_64 rng(0);
  FreshNames names;
  Teacher teacher(loop, solver, rng, names);
  return teacher.check_invariant(parse_formula(text, loop)).holds;
}

// Seeds 0-9 in sequence, each under its own wall-clock limit.
std::size_t found(const std::string& name, int limit_s, std::string& detail)
{
  AnnotatedLoop loop = testing::corpus_loop(name);
  std::size_t n = 0;
  double total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EngineConfig cfg;
    cfg.seed = seed;
    cfg.timeout = std::chrono::seconds(limit_s);
    InferenceResult r = infer(loop, cfg);
    total += static_cast<double>(r.stats.time_ms) / 1000;
    if (r.outcome == Outcome::Invariant && r.stats.time_ms <= limit_s * 1000) ++n;
    all_runs.push_back({name, loop, r});
  }
  detail = name + " " + std::to_string(n) + "/10 within " + std::to_string(limit_s) + " s (total " +
           std::to_string(static_cast<int>(total)) + " s)";
  return n;
}

bool ac1()
{
  std::string d;
  std::size_t n = found("intro", 60, d);
  bool known = holds(testing::corpus_loop("intro"), "x = y && x >= 0");
  return report(1, n >= 9 && known, d + "; x = y && x >= 0 " + (known ? "is" : "is not") + " an invariant");
}

bool ac2()
{
  std::string d;
  std::size_t n = found("tar", 60, d);
  bool known = holds(testing::corpus_loop("tar"), "M + N <= copy + size && copy + size <= M + N");
  return report(2, n >= 9 && known, d + "; the two-inequality invariant " + (known ? "holds" : "fails"));
}

bool ac3()
{
  std::string dp, di;
  std::size_t np = found("parser", 300, dp);
  std::size_t start = all_runs.size();
  std::size_t ni = found("ide_wait_ireason", 300, di);

  AnnotatedLoop ide = testing::corpus_loop("ide_wait_ireason");
  Solver solver(SolverConfig{.integers = ide.integer_vars()});
  auto atoms = program_atoms(ide);
  Formula bound = parse_formula("retries < 100", ide);
  bool exits_below = true, new_atom = false;
  for (std::size_t i = start; i < all_runs.size(); ++i) {
    const auto& r = all_runs[i].result;
    if (r.outcome != Outcome::Invariant) continue;
    Formula exit = Formula::mk_and(*r.invariant, Formula::mk_not(ide.guard));
    exits_below = exits_below && solver.is_valid(Formula::mk_implies(exit, bound));
    for (const auto& a : r.predicates)
      if (!atoms.count(a)) new_atom = true;
  }
  return report(3, np >= 7 && ni >= 7 && exits_below && new_atom,
                dp + "; " + di + "; exit implies retries < 100: " + (exits_below ? "yes" : "no") +
                    "; predicate outside the program text: " + (new_atom ? "yes" : "no"));
}

bool ac4()
{
  auto start = std::chrono::steady_clock::now();
  testing::Gen g(4, {"x", "y", "z"}, {});
  Solver s;
  int implied = 0;
  const int n = 600;
  Violation bad;
  for (int k = 0; k < n && !bad; ++k) bad = testing::check_lemmas(testing::lemma_instance(g), s, &implied);
  double t = Seconds(std::chrono::steady_clock::now() - start).count();
  return report(4, !bad && t < 120,
                bad ? *bad
                    : std::to_string(n) + " instances, " + std::to_string(implied) + " with theta => rho, " +
                          std::to_string(static_cast<int>(t)) + " s");
}

bool ac5()
{
  testing::Gen ga(5, {"w", "x", "y"}, {});
  testing::Gen gb(6, {"x", "y", "z"}, {});
  Solver s;
  int pairs = 0;
  Violation bad;
  for (int tries = 0; pairs < 200 && tries < 100000 && !bad; ++tries) {
    auto a = ga.cube(static_cast<std::size_t>(ga.pick(3) + 1));
    auto b = gb.cube(static_cast<std::size_t>(gb.pick(3) + 1));
    Formula fa = Formula::mk_and(a), fb = Formula::mk_and(b);
    if (!s.is_sat(fa) || !s.is_sat(fb) || s.is_sat(Formula::mk_and(fa, fb))) continue;
    ++pairs;
    bad = testing::check_interpolant(fa, fb, cube_interpolant(a, b), s);
  }
  int chains = 0;
  if (!bad)
    for (const auto& x : testing::corpus_xi_sequences()) {
      Solver ls(SolverConfig{.integers = x.loop.integer_vars()});
      bad = testing::check_chain(x.seq, sequence_interpolant(x.seq, ls), ls);
      if (bad) {
        *bad = x.name + ": " + *bad;
        break;
      }
      ++chains;
    }
  return report(5, !bad && pairs == 200 && chains > 0,
                bad ? *bad
                    : std::to_string(pairs) + " random pairs, " + std::to_string(chains) + " corpus sequences");
}

bool ac6()
{
  auto start = std::chrono::steady_clock::now();
  std::size_t most = 0;
  Violation bad;
  for (std::uint64_t table = 0; table < 256 && !bad; ++table) {
    std::size_t used = 0;
    bad = testing::check_cdnf_target(3, table, 200, &used);
    most = std::max(most, used);
  }
  double t = Seconds(std::chrono::steady_clock::now() - start).count();
  return report(6, !bad && t < 60,
                bad ? *bad : "256 targets, at most " + std::to_string(most) + " queries, " + std::to_string(t) + " s");
}

bool ac7()
{
  testing::ProgramGen pg(7);
  Solver solver;
  auto states = testing::ProgramGen::states();
  Violation bad;
  int n = 0;
  for (; n < 300 && !bad; ++n) {
    auto prog = pg.program();
    bad = testing::check_pre(prog, pg.post());
    if (!bad) {
      const Valuation& nu = states[static_cast<std::size_t>(pg.gen().pick(static_cast<int>(states.size())))];
      bad = testing::check_transition(prog, nu, solver);
    }
  }
  return report(7, !bad, bad ? *bad : std::to_string(n) + " programs, Pre and [[S]] agree with execution");
}

bool ac8()
{
  AnnotatedLoop loop = testing::corpus_loop("intro");
  Solver solver(SolverConfig{.integers = loop.integer_vars()});
  std::mt19937_64 rng(0);
  FreshNames names;
  Teacher teacher(loop, solver, rng, names);
  PredicateSet p({atom(loop, "y = 0")});
  teacher.reset(p);
  Answer first = teacher.resolve_equivalence(Formula::falsity());
  bool first_ok = !first.yes && first.counterexample == AbstractValuation{false};
  bool conflict = false;
  try {
    teacher.resolve_equivalence(Formula::truth());
  } catch (const Conflict&) {
    conflict = true;
  }
  const auto& w = teacher.witnesses();
  bool second_ok = w.size() == 2 && alpha_star(w[1].nu, p) == AbstractValuation{false};
  bool directions = w.size() == 2 && w[0].direction == Direction::Positive && w[1].direction == Direction::Negative;
  ConflictEvidence ev = teacher.find_conflict_pair();
  bool pair = ev.concrete && alpha_star(ev.nu, p) == alpha_star(ev.nu_prime, p) && !(ev.nu == ev.nu_prime);
  std::string d = "EQ(False) -> " + (first.yes ? std::string("yes") : to_string(first.counterexample)) +
                  ", EQ(True) -> " + (conflict ? "Conflict" : "no conflict");
  if (ev.concrete) d += ", pair " + ev.nu.to_string() + " / " + ev.nu_prime.to_string();
  return report(8, first_ok && conflict && second_ok && directions && pair, d);
}

bool ac9()
{
  std::size_t invariants = 0, failed = 0;
  for (const auto& r : all_runs) {
    if (r.result.outcome != Outcome::Invariant) continue;
    ++invariants;
    if (!r.result.invariant || !verify_invariant(r.program, *r.result.invariant)) ++failed;
  }
  return report(9, failed == 0 && invariants > 0,
                std::to_string(invariants) + " invariant outcomes re-verified, " + std::to_string(failed) + " failed");
}

}  // namespace

int main()
{
  bool ok = true;
  for (auto* check : {ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9}) {
    try {
      ok = check() && ok;
    } catch (const std::exception& e) {
      std::cout << "FAIL: " << e.what() << std::endl;
      ok = false;
    }
  }
  return ok ? 0 : 1;
}
