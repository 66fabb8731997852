#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "linv/engine.hpp"
#include "support.hpp"

namespace linv {
namespace {

EngineConfig config(std::uint64_t seed, int timeout_s = 60)
{
  EngineConfig cfg;
  cfg.seed = seed;
  cfg.timeout = std::chrono::seconds(timeout_s);
  return cfg;
}

void expect_sound(const AnnotatedLoop& loop, const InferenceResult& r)
{
  if (r.outcome != Outcome::Invariant) return;
  ASSERT_TRUE(r.invariant);
  EXPECT_TRUE(verify_invariant(loop, *r.invariant)) << to_string(*r.invariant);
}

TEST(Engine, DegenerateLoop)
{
  AnnotatedLoop loop = parse_loop("rat x; pre { true } while (false) { nop; } post { true }");
  InferenceResult r = infer(loop, config(0));
  ASSERT_EQ(r.outcome, Outcome::Invariant);
  EXPECT_TRUE(r.invariant->is_true());
  EXPECT_EQ(r.stats.equivalence_queries, 1u);
  EXPECT_EQ(r.stats.membership_queries, 0u);
  EXPECT_EQ(r.stats.restarts, 0u);
}

TEST(Engine, IntroSeeds)
{
  AnnotatedLoop loop = testing::corpus_loop("intro");
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    InferenceResult r = infer(loop, config(seed));
    EXPECT_EQ(r.outcome, Outcome::Invariant) << "seed " << seed << ": " << r.note;
    expect_sound(loop, r);
    EXPECT_EQ(r.stats.predicates, r.predicates.size());
    EXPECT_GE(r.stats.initial_batches, 1u);
  }
}

TEST(Engine, Tar)
{
  AnnotatedLoop loop = testing::corpus_loop("tar");
  InferenceResult r = infer(loop, config(0));
  ASSERT_EQ(r.outcome, Outcome::Invariant) << r.note;
  expect_sound(loop, r);
}

TEST(Engine, ImpossibleLoop)
{
  AnnotatedLoop loop = parse_loop_file(std::string(LINV_TEST_DATA_DIR) + "/impossible.loop");
  InferenceResult r = infer(loop, config(0));
  EXPECT_EQ(r.outcome, Outcome::NoInvariantPossible);
  EXPECT_FALSE(r.invariant);
  EXPECT_FALSE(r.note.empty());
}

TEST(Engine, Timeout)
{
  AnnotatedLoop loop = testing::corpus_loop("parser");
  EngineConfig cfg = config(0);
  cfg.timeout = std::chrono::milliseconds(1);
  InferenceResult r = infer(loop, cfg);
  EXPECT_EQ(r.outcome, Outcome::Timeout);
  EXPECT_FALSE(r.invariant);
  cfg.timeout = std::chrono::milliseconds(0);
  EXPECT_THROW(infer(loop, cfg), Error);
}

TEST(Engine, RestartCap)
{
  AnnotatedLoop loop = testing::corpus_loop("parser");
  EngineConfig cfg = config(0);
  cfg.max_restarts = 0;
  InferenceResult r = infer(loop, cfg);
  EXPECT_LE(r.stats.restarts, 0u);
  if (r.outcome != Outcome::Invariant) EXPECT_EQ(r.note, "restart limit reached");
  expect_sound(loop, r);
}

TEST(Engine, Deterministic)
{
  for (const char* name : {"intro", "ide_wait_ireason"}) {
    AnnotatedLoop loop = testing::corpus_loop(name);
    std::ostringstream t1, t2;
    EngineConfig c1 = config(4), c2 = config(4);
    c1.trace = &t1;
    c2.trace = &t2;
    InferenceResult a = infer(loop, c1);
    InferenceResult b = infer(loop, c2);
    ASSERT_EQ(a.outcome, b.outcome) << name;
    EXPECT_EQ(a.stats.membership_queries, b.stats.membership_queries) << name;
    EXPECT_EQ(a.stats.equivalence_queries, b.stats.equivalence_queries) << name;
    EXPECT_EQ(a.stats.restarts, b.stats.restarts) << name;
    EXPECT_EQ(a.predicates, b.predicates) << name;
    if (a.invariant) EXPECT_EQ(*a.invariant, *b.invariant) << name;
    EXPECT_EQ(t1.str(), t2.str()) << name;
  }
}

// |P| from the trace's PRED lines never decreases, and the final P
// starts with the initial batch.
TEST(Engine, PredicatesOnlyGrow)
{
  AnnotatedLoop loop = testing::corpus_loop("intro");
  for (std::uint64_t seed = 5; seed < 8; ++seed) {
    std::ostringstream trace;
    EngineConfig cfg = config(seed);
    cfg.trace = &trace;
    InferenceResult r = infer(loop, cfg);
    expect_sound(loop, r);
    std::istringstream in(trace.str());
    std::size_t last = 0;
    int batches = 0;
    for (std::string line; std::getline(in, line);) {
      if (line.rfind("PRED ", 0) != 0) continue;
      ++batches;
      std::size_t at = line.find("|P|=");
      ASSERT_NE(at, std::string::npos);
      std::size_t size = std::stoul(line.substr(at + 4));
      EXPECT_GE(size, last) << line;
      last = size;
    }
    EXPECT_EQ(static_cast<std::size_t>(batches),
              r.stats.initial_batches + r.stats.conjecture_batches + r.stats.conflict_batches);
    EXPECT_EQ(last, r.stats.predicates);
  }
}

TEST(Engine, StatsJson)
{
  AnnotatedLoop loop = testing::corpus_loop("tar");
  InferenceResult r = infer(loop, config(1));
  auto j = nlohmann::json::parse(stats_json("tar", r));
  EXPECT_EQ(j["example"], "tar");
  EXPECT_EQ(j["outcome"], "invariant");
  EXPECT_TRUE(j["invariant"].is_string());
  for (const char* k : {"P", "MEM", "EQ", "RE", "time_ms"}) EXPECT_TRUE(j[k].is_number_integer()) << k;
  for (const char* k : {"initial", "conjecture", "conflict"}) EXPECT_TRUE(j["batches"][k].is_number_integer()) << k;
  EXPECT_EQ(j["P"], r.stats.predicates);

  InferenceResult none;
  none.outcome = Outcome::NoInvariantPossible;
  auto k = nlohmann::json::parse(stats_json("x", none));
  EXPECT_EQ(k["outcome"], "no_invariant_possible");
  EXPECT_TRUE(k["invariant"].is_null());
}

TEST(Corpus, EmptyAndErrors)
{
  EngineConfig cfg = config(0);
  EXPECT_TRUE(run_corpus({}, cfg, 3).empty());
  std::string table = corpus_table({});
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 1);

  auto entries = run_corpus({testing::corpus("tar.loop"), std::string(LINV_TEST_DATA_DIR) + "/bad_syntax.loop"}, cfg, 2);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_TRUE(entries[0].error.empty());
  ASSERT_EQ(entries[0].runs.size(), 2u);
  for (const auto& r : entries[0].runs) EXPECT_EQ(r.outcome, Outcome::Invariant);
  EXPECT_FALSE(entries[1].error.empty());
  EXPECT_TRUE(entries[1].runs.empty());
  table = corpus_table(entries);
  EXPECT_NE(table.find("tar.loop"), std::string::npos);
  EXPECT_NE(table.find("2/2"), std::string::npos);
  EXPECT_NE(table.find("error:"), std::string::npos);
}

TEST(Corpus, AllExamplesAreSound)
{
  std::vector<std::string> paths;
  for (const auto& n : testing::corpus_names()) paths.push_back(testing::corpus(n + ".loop"));
  auto entries = run_corpus(paths, config(20), 2);
  ASSERT_EQ(entries.size(), 4u);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    AnnotatedLoop loop = testing::corpus_loop(testing::corpus_names()[i]);
    for (const auto& r : entries[i].runs) expect_sound(loop, r);
  }
}

}  // namespace
}  // namespace linv
