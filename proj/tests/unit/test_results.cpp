#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "pfev/config.hpp"
#include "pfev/harness.hpp"
#include "pfev/reference_frontier.hpp"
#include "pfev/results_io.hpp"

using namespace pfev;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pfev_results_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

RunConfig small_config(std::uint64_t seed) {
  RunConfig c;
  c.problem.d = 2;
  c.problem.L = 2;
  c.problem.num_features = 200;
  c.strategy = Strategy::kPfevMap;
  c.iterations = 2;
  c.num_samples = 2;
  c.num_features = 100;
  c.nsga2 = nsga2::Config{12, 10};
  c.direct.max_evaluations = 40;
  c.reference.generations = 50;
  c.seed = seed;
  return c;
}

std::string first_line(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

harness::RunHistory fake_run(std::uint64_t seed, std::vector<double> rhvs) {
  harness::RunHistory h;
  h.problem_id = "p";
  h.strategy = "random";
  h.seed = seed;
  h.initial_rhv = rhvs.front();
  for (std::size_t t = 1; t < rhvs.size(); ++t) {
    harness::IterationRecord r;
    r.iteration = static_cast<int>(t);
    r.rhv = rhvs[t];
    h.iterations.push_back(r);
  }
  return h;
}

}  // namespace

TEST(Results, RoundTrip) {
  const RunConfig c = small_config(5);
  const harness::RunHistory h = harness::run_bo(c);
  const auto dir = scratch("roundtrip");
  results::write_run(dir.string(), c, h);
  const harness::RunHistory back = results::read_run(dir.string());
  EXPECT_EQ(back.problem_id, h.problem_id);
  EXPECT_EQ(back.strategy, h.strategy);
  EXPECT_EQ(back.seed, h.seed);
  EXPECT_EQ(back.reference_point, h.reference_point);
  EXPECT_EQ(back.reference_hypervolume, h.reference_hypervolume);
  EXPECT_EQ(back.reference_size, h.reference_size);
  EXPECT_EQ(back.initial_x, h.initial_x);
  EXPECT_EQ(back.initial_y, h.initial_y);
  EXPECT_EQ(back.initial_f, h.initial_f);
  EXPECT_EQ(back.initial_hypervolume, h.initial_hypervolume);
  EXPECT_EQ(back.initial_rhv, h.initial_rhv);
  ASSERT_EQ(back.iterations.size(), h.iterations.size());
  for (std::size_t t = 0; t < h.iterations.size(); ++t) {
    const auto& a = h.iterations[t];
    const auto& b = back.iterations[t];
    EXPECT_EQ(a.iteration, b.iteration);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.y, b.y);
    EXPECT_EQ(a.f, b.f);
    EXPECT_EQ(a.lambda, b.lambda);
    EXPECT_EQ(a.acquisition, b.acquisition);
    EXPECT_EQ(a.hypervolume, b.hypervolume);
    EXPECT_EQ(a.rhv, b.rhv);
    EXPECT_EQ(a.timings.total, b.timings.total);
  }
  std::filesystem::remove_all(dir);
}

TEST(Results, StreamingWriterMatchesWholeRun) {
  const RunConfig c = small_config(6);
  const auto streamed = scratch("stream");
  const auto whole = scratch("whole");
  harness::RunHistory h;
  {
    results::RunWriter writer(streamed.string(), c);
    h = harness::run_bo(c, std::ref(writer));
  }
  results::write_run(whole.string(), c, h);
  std::ifstream a(streamed / results::kHistoryFile), b(whole / results::kHistoryFile);
  const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
  EXPECT_EQ(sa, sb);
  std::filesystem::remove_all(streamed);
  std::filesystem::remove_all(whole);
}

TEST(Results, SchemaHeaders) {
  const auto dir = scratch("schema");
  const RunConfig c = small_config(7);
  results::write_run(dir.string(), c, harness::run_bo(c));
  EXPECT_NE(first_line(dir / results::kHistoryFile).find("\"schema_version\":1"), std::string::npos);
  EXPECT_EQ(first_line(dir / results::kTimingsFile), "# schema_version 1");
  results::write_summary_csv((dir / "summary.csv").string(), {fake_run(1, {0.1, 0.2})});
  EXPECT_EQ(first_line(dir / "summary.csv"), "# schema_version 1");
  std::filesystem::remove_all(dir);
}

TEST(Results, SchemaMismatchRejected) {
  const auto dir = scratch("mismatch");
  std::ofstream(dir / results::kHistoryFile) << "{\"type\":\"header\",\"schema_version\":99}\n";
  EXPECT_THROW(results::read_run(dir.string()), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST(Results, SeriesAggregatesExactlyTheRuns) {
  const std::vector<harness::RunHistory> runs{fake_run(1, {0.1, 0.4}), fake_run(2, {0.3, 0.6}), fake_run(3, {0.2, 0.8})};
  const auto series = results::rhv_series(runs);
  ASSERT_EQ(series.size(), 2u);
  EXPECT_EQ(series[0].count, 3);
  EXPECT_NEAR(series[0].mean, 0.2, 1e-15);
  EXPECT_NEAR(series[0].sd, 0.1, 1e-15);
  EXPECT_NEAR(series[1].mean, 0.6, 1e-15);
  EXPECT_NEAR(series[1].sd, 0.2, 1e-15);
  EXPECT_THROW(results::rhv_series({fake_run(1, {0.1}), fake_run(2, {0.1, 0.2})}), std::invalid_argument);
}
