#include <random>

#include <benchmark/benchmark.h>

#include "pfev/acquisition.hpp"
#include "pfev/geometry.hpp"
#include "pfev/gp.hpp"
#include "pfev/normal.hpp"
#include "pfev/nsga2.hpp"
#include "pfev/problems.hpp"
#include "pfev/sampler.hpp"
#include "pfev/studies.hpp"

using namespace pfev;

namespace {

Matrix uniform(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

ParetoSet simplex_frontier(int L, int n) { return non_dominated_filter(studies::simplex_points(L, n, 1)); }

}  // namespace

static void BM_NormalTail(benchmark::State& state) {
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.01 * static_cast<double>(i % 500);
    normal_tail_inplace(v.data(), static_cast<long>(v.size()));
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NormalTail)->Arg(1024);

static void BM_GpFit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  gp::Dataset data(uniform(n, 2, 1), uniform(n, 3, 2));
  for (auto _ : state) benchmark::DoNotOptimize(gp::fit(data, Box::unit(2)));
}
BENCHMARK(BM_GpFit)->Arg(10)->Arg(55)->Unit(benchmark::kMillisecond);

static void BM_PathEvaluateBatch(benchmark::State& state) {
  const auto path = sampler::draw_prior_path({gp::KernelParams{}, gp::KernelParams{}, gp::KernelParams{}}, 2, 500, 3);
  const Matrix x = uniform(state.range(0), 2, 4);
  for (auto _ : state) benchmark::DoNotOptimize(path.evaluate_batch(x));
}
BENCHMARK(BM_PathEvaluateBatch)->Arg(100);

static void BM_Nsga2(benchmark::State& state) {
  const auto path = sampler::draw_prior_path({gp::KernelParams{}, gp::KernelParams{}, gp::KernelParams{}}, 2, 500, 5);
  const nsga2::BatchObjective f = [&](const Matrix& x) { return path.evaluate_batch(x); };
  nsga2::Config cfg{50, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(nsga2::solve(f, Box::unit(2), cfg));
}
BENCHMARK(BM_Nsga2)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_Decompose(benchmark::State& state) {
  const ParetoSet front = simplex_frontier(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(geometry::decompose_dominated(front.points));
}
BENCHMARK(BM_Decompose)->Args({2, 50})->Args({3, 50})->Args({4, 30})->Unit(benchmark::kMicrosecond);

static void BM_TruncationQuantities(benchmark::State& state) {
  const ParetoSet front = simplex_frontier(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto over = geometry::decompose_dominated(front.points);
  const auto flipped = geometry::decompose_dominating(front.points);
  const Vector mean = Vector::Constant(state.range(0), 0.3);
  const Vector sd = Vector::Constant(state.range(0), 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(geometry::truncation_quantities(over, flipped, mean, sd));
}
BENCHMARK(BM_TruncationQuantities)->Args({2, 50})->Args({3, 50})->Args({4, 30});

static void BM_Hypervolume(benchmark::State& state) {
  const ParetoSet front = simplex_frontier(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const Vector ref = Vector::Zero(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(geometry::hypervolume(front, ref));
}
BENCHMARK(BM_Hypervolume)->Args({3, 100})->Args({4, 50});

static void BM_AcquisitionTerms(benchmark::State& state) {
  const problems::Problem problem = problems::make_synthetic_gp(2, 3, 0.1, 1);
  gp::Dataset data(2, 3);
  const Matrix x = uniform(10, 2, 6);
  for (Eigen::Index i = 0; i < x.rows(); ++i) data.append(x.row(i).transpose(), problem.evaluate(x.row(i).transpose()));
  const gp::IndependentGps gps = gp::fit(data, Box::unit(2));
  acquisition::SampleConfig cfg;
  cfg.nsga2 = nsga2::Config{50, 100};
  const auto samples = acquisition::prepare_samples(gps, Box::unit(2), cfg);
  const Matrix probes = uniform(64, 2, 7);
  Eigen::Index i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(acquisition::optimize_lambda(probes.row(i % 64).transpose(), samples, gps,
                                                          acquisition::LambdaPolicy{}, acquisition::Estimator::kMap));
    ++i;
  }
}
BENCHMARK(BM_AcquisitionTerms)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
