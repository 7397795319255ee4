#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pfev/config.hpp"
#include "pfev/harness.hpp"
#include "pfev/reference_frontier.hpp"

using namespace pfev;

namespace {

RunConfig tiny(Strategy s, int iterations) {
  RunConfig c;
  c.problem.d = 2;
  c.problem.L = 2;
  c.problem.num_features = 300;
  c.strategy = s;
  c.iterations = iterations;
  c.num_samples = 2;
  c.num_features = 200;
  c.nsga2 = nsga2::Config{12, 20};
  c.direct.max_evaluations = 60;
  c.seed = 3;
  return c;
}

struct Bench {
  problems::Problem problem;
  ParetoSet reference;
  explicit Bench(const RunConfig& c) : problem(make_problem(c.problem, c.seed)) {
    reference::Config rc;
    rc.generations = 200;
    reference = reference::build(problem, rc);
  }
};

void expect_well_formed(const harness::RunHistory& h) {
  double previous = h.initial_hypervolume;
  for (const auto& it : h.iterations) {
    EXPECT_GE(it.hypervolume, previous);
    previous = it.hypervolume;
    EXPECT_LE(it.rhv, 1.0 + 1e-9);
    EXPECT_GE(it.rhv, 0.0);
  }
}

Matrix all_inputs(const harness::RunHistory& h) {
  Matrix x = h.initial_x;
  for (const auto& it : h.iterations) {
    x.conservativeResize(x.rows() + it.x.rows(), Eigen::NoChange);
    x.bottomRows(it.x.rows()) = it.x;
  }
  return x;
}

}  // namespace

TEST(Config, DefaultsFromEmptyDocument) {
  EXPECT_EQ(to_json(parse_run_config("{}")), to_json(RunConfig{}));
}

TEST(Config, RoundTrip) {
  RunConfig c = tiny(Strategy::kParego, 7);
  c.noise.enabled = true;
  c.noise.stddev = 0.2;
  c.problem.kind = "named";
  c.problem.name = "viennet";
  c.lambda.refine = true;
  const std::string text = to_json(c);
  EXPECT_EQ(to_json(parse_run_config(text)), text);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_run_config("{\"strategy\": \"pfes\"}"), ConfigError);
  EXPECT_THROW(parse_run_config("{\"iteratons\": 3}"), ConfigError);
  EXPECT_THROW(parse_run_config("{\"iterations\": 0}"), ConfigError);
  EXPECT_THROW(parse_run_config("{\"nsga2\": {\"population\": 7}}"), ConfigError);
  EXPECT_THROW(parse_run_config("{not json"), ConfigError);
  EXPECT_THROW(parse_run_config("{\"batch_size\": 2, \"noise\": {\"enabled\": true}}"), ConfigError);
}

TEST(Rhv, Examples) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix pts(6, 3);
  for (int i = 0; i < 6; ++i) {
    Vector d(3);
    d << u(rng) + 0.01, u(rng) + 0.01, u(rng) + 0.01;
    pts.row(i) = (d / d.norm()).transpose();
  }
  const ParetoSet ref = non_dominated_filter(pts);
  EXPECT_NEAR(harness::rhv(ref.points, ref), 1.0, 1e-12);
  const Vector corner = harness::rhv_reference_point(ref);
  EXPECT_EQ(harness::rhv(corner.transpose(), ref), 0.0);
  EXPECT_EQ(harness::rhv((corner.array() - 1.0).matrix().transpose(), ref), 0.0);

  const Matrix subset = ref.points.topRows(std::max(1, ref.size() / 2));
  const double expected = oracle::inclusion_exclusion_hv(subset, corner) / oracle::inclusion_exclusion_hv(ref.points, corner);
  EXPECT_NEAR(harness::rhv(subset, ref), expected, 1e-9);
  EXPECT_GT(expected, 0.0);
}

TEST(RunBo, RandomSearchBookkeeping) {
  const RunConfig c = tiny(Strategy::kRandom, 20);
  const Bench s(c);
  const harness::RunHistory h = harness::run_bo(c, s.problem, s.reference);
  EXPECT_EQ(h.num_observations(), 25);
  ASSERT_EQ(h.iterations.size(), 20u);
  expect_well_formed(h);
  for (const auto& it : h.iterations) EXPECT_TRUE(std::isnan(it.acquisition[0]));
}

TEST(RunBo, PfevMapRunsAndTimes) {
  const RunConfig c = tiny(Strategy::kPfevMap, 3);
  const Bench s(c);
  int calls = 0;
  const harness::RunHistory h =
      harness::run_bo(c, s.problem, s.reference, [&](const harness::RunHistory&, const harness::IterationRecord*) { ++calls; });
  EXPECT_EQ(calls, 4);
  expect_well_formed(h);
  const auto grid = acquisition::LambdaPolicy::default_grid();
  for (const auto& it : h.iterations) {
    EXPECT_NE(std::find(grid.begin(), grid.end(), it.lambda[0]), grid.end());
    EXPECT_TRUE(std::isfinite(it.acquisition[0]));
    EXPECT_NEAR(it.timings.phase_sum(), it.timings.total, 0.1 * it.timings.total);
    EXPECT_TRUE(s.problem.domain().contains(it.x.row(0).transpose()));
  }
}

TEST(RunBo, FixedLambdaAblations) {
  for (auto [strategy, lambda] : {std::pair{Strategy::kPfevLambda1, 1.0}, std::pair{Strategy::kPfevLambdaMin, 1e-3}}) {
    const RunConfig c = tiny(strategy, 2);
    const Bench s(c);
    const harness::RunHistory h = harness::run_bo(c, s.problem, s.reference);
    ASSERT_EQ(h.iterations.size(), 2u);
    for (const auto& it : h.iterations) EXPECT_EQ(it.lambda[0], lambda);
  }
}

TEST(RunBo, OtherStrategiesRun) {
  for (Strategy strategy : {Strategy::kPfevMc, Strategy::kParego}) {
    const RunConfig c = tiny(strategy, 2);
    const Bench s(c);
    const harness::RunHistory h = harness::run_bo(c, s.problem, s.reference);
    EXPECT_EQ(h.num_observations(), 7);
    expect_well_formed(h);
  }
}

TEST(RunBo, Deterministic) {
  const RunConfig c = tiny(Strategy::kPfevMap, 2);
  const Bench s(c);
  const auto a = harness::run_bo(c, s.problem, s.reference);
  const auto b = harness::run_bo(c, s.problem, s.reference);
  EXPECT_EQ(all_inputs(a), all_inputs(b));
}

TEST(RunBo, ForcedConditionalPathMatchesSingleQuery) {
  RunConfig c = tiny(Strategy::kPfevMap, 2);
  const Bench s(c);
  const auto plain = harness::run_bo(c, s.problem, s.reference);
  c.force_cmi = true;
  const auto forced = harness::run_bo(c, s.problem, s.reference);
  EXPECT_EQ(all_inputs(plain), all_inputs(forced));
  for (std::size_t t = 0; t < plain.iterations.size(); ++t)
    EXPECT_EQ(plain.iterations[t].acquisition[0], forced.iterations[t].acquisition[0]);
}

TEST(RunBo, BatchPicksDiffer) {
  RunConfig c = tiny(Strategy::kPfevMap, 2);
  c.batch_size = 2;
  const Bench s(c);
  const auto h = harness::run_bo(c, s.problem, s.reference);
  EXPECT_EQ(h.num_observations(), 9);
  for (const auto& it : h.iterations) {
    ASSERT_EQ(it.x.rows(), 2);
    EXPECT_NE(it.x.row(0), it.x.row(1));
  }
}

TEST(RunBo, NoisyObservations) {
  RunConfig c = tiny(Strategy::kPfevMap, 2);
  c.noise.enabled = true;
  c.noise.draws = 2;
  const Bench s(c);
  const auto h = harness::run_bo(c, s.problem, s.reference);
  for (const auto& it : h.iterations) {
    EXPECT_NE(it.y, it.f);
    EXPECT_EQ(it.f.row(0).transpose(), s.problem.evaluate(it.x.row(0).transpose()));
  }
}

#ifdef PFEV_CLI_PATH
TEST(Cli, ConfigErrorExitCode) {
  const auto dir = std::filesystem::temp_directory_path() / "pfev_cli_test";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "bad.json";
  std::ofstream(cfg) << "{\"strategy\": \"unknown\"}";
  const std::string cmd = std::string(PFEV_CLI_PATH) + " run --config " + cfg.string() + " --out " +
                          (dir / "out").string() + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
  std::filesystem::remove_all(dir);
}
#endif
