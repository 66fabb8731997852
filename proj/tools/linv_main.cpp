#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "linv/engine.hpp"

namespace {

struct Options
{
  std::uint64_t seed = 0;
  double timeout_s = 60;
  std::size_t max_restarts = 100000;
  std::string solver = "builtin";
  std::string solver_cmd;
  std::string interpolator_cmd;
  std::size_t dnf_cap = 4096;
  std::string trace_path;
  std::string stats_path;
};

std::vector<std::string> split_words(const std::string& s)
{
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

void add_engine_options(CLI::App* app, Options& o)
{
  app->add_option("--seed", o.seed, "random seed");
  app->add_option("--timeout", o.timeout_s, "wall-clock limit per run, seconds")->check(CLI::PositiveNumber);
  app->add_option("--max-restarts", o.max_restarts, "learner restarts before giving up");
  app->add_option("--solver", o.solver, "decision procedure")->check(CLI::IsMember({"builtin", "external"}));
  app->add_option("--solver-cmd", o.solver_cmd, "external solver command; {} is replaced by a script file");
  app->add_option("--interpolator-cmd", o.interpolator_cmd, "external interpolating prover command");
  app->add_option("--dnf-cap", o.dnf_cap, "cube limit per interpolation side")->check(CLI::PositiveNumber);
  app->add_option("--stats-json", o.stats_path, "write statistics as JSON");
}

linv::EngineConfig engine_config(const Options& o)
{
  linv::EngineConfig cfg;
  cfg.seed = o.seed;
  cfg.max_restarts = o.max_restarts;
  cfg.timeout = std::chrono::milliseconds(static_cast<long long>(o.timeout_s * 1000));
  if (o.solver == "external") {
    if (o.solver_cmd.empty()) throw linv::Error("--solver external needs --solver-cmd");
    cfg.solver.backend = linv::SolverConfig::Backend::External;
    cfg.solver.command = split_words(o.solver_cmd);
  }
  cfg.interpolation.dnf_cap = o.dnf_cap;
  cfg.interpolation.external_command = split_words(o.interpolator_cmd);
  return cfg;
}

int exit_code(linv::Outcome o)
{
  switch (o) {
    case linv::Outcome::Invariant: return 0;
    case linv::Outcome::Timeout: return 2;
    case linv::Outcome::NoInvariantPossible: return 3;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Loop invariant inference by learning over predicate abstractions"};
  app.require_subcommand(1);
  Options o;
  std::string file;
  std::string dir;
  std::size_t runs = 1;

  auto* inf = app.add_subcommand("infer", "infer an invariant for one annotated loop");
  inf->add_option("file", file, "loop file")->required();
  add_engine_options(inf, o);
  inf->add_option("--trace", o.trace_path, "write the query/answer log");

  auto* corpus = app.add_subcommand("corpus", "run every .loop file of a directory");
  corpus->add_option("dir", dir, "directory")->required();
  corpus->add_option("--runs", runs, "seeded runs per example")->check(CLI::PositiveNumber);
  add_engine_options(corpus, o);

  CLI11_PARSE(app, argc, argv);

  try {
    linv::EngineConfig cfg = engine_config(o);
    if (*inf) {
      linv::AnnotatedLoop loop = linv::parse_loop_file(file);
      std::ofstream trace;
      if (!o.trace_path.empty()) {
        trace.open(o.trace_path);
        if (!trace) throw linv::Error("cannot write " + o.trace_path);
        cfg.trace = &trace;
      }
      linv::InferenceResult r = linv::infer(loop, cfg);
      if (r.invariant)
        std::cout << "invariant: " << *r.invariant << '\n';
      else
        std::cout << linv::outcome_name(r.outcome) << (r.note.empty() ? "" : ": " + r.note) << '\n';
      std::cout << "P=" << r.stats.predicates << " MEM=" << r.stats.membership_queries
                << " EQ=" << r.stats.equivalence_queries << " RE=" << r.stats.restarts
                << " time=" << r.stats.time_ms << "ms\n";
      if (!o.stats_path.empty()) {
        std::ofstream out(o.stats_path);
        out << linv::stats_json(std::filesystem::path(file).stem().string(), r) << '\n';
      }
      return exit_code(r.outcome);
    }

    std::vector<std::string> paths;
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.path().extension() == ".loop") paths.push_back(e.path().string());
    std::sort(paths.begin(), paths.end());
    auto entries = linv::run_corpus(paths, cfg, runs);
    std::cout << linv::corpus_table(entries);
    if (!o.stats_path.empty()) {
      std::ofstream out(o.stats_path);
      for (const auto& e : entries) {
        std::string name = std::filesystem::path(e.example).stem().string();
        for (const auto& r : e.runs) out << linv::stats_json(name, r) << '\n';
      }
    }
    for (const auto& e : entries)
      if (!e.error.empty()) return 1;
    return 0;
  } catch (const linv::ParseError& e) {
    std::cerr << file << ":" << e.what() << '\n';
    return 1;
  } catch (const linv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
