#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "instances.hpp"
#include "oracles.hpp"
#include "pfev/acquisition.hpp"
#include "pfev/problems.hpp"

using namespace pfev;
using namespace pfev::acquisition;
using fixtures::Fixture;

namespace {

Term term(double z_over, double z_under, bool in_over, bool in_under) { return {z_over, z_under, in_over, in_under}; }

std::vector<double> grid_values(std::span<const Term> terms, Estimator est) {
  std::vector<double> v;
  for (double lambda : LambdaPolicy::default_grid())
    v.push_back(est == Estimator::kMap ? lb_map(terms, lambda) : lb_naive_mc(terms, lambda));
  return v;
}

// Largest increase of slope over consecutive grid triples.
double worst_convexity(const std::vector<double>& v) {
  const auto grid = LambdaPolicy::default_grid();
  double worst = -kInf;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const double left = (v[i] - v[i - 1]) / (grid[i] - grid[i - 1]);
    const double right = (v[i + 1] - v[i]) / (grid[i + 1] - grid[i]);
    worst = std::max(worst, (right - left) * (grid[i + 1] - grid[i - 1]) / 2.0);
  }
  return worst;
}

}  // namespace

TEST(NaiveBound, WorkedExamples) {
  const Term over = term(0.25, 0.75, true, true);
  const Term between = term(0.25, 0.75, false, true);
  EXPECT_NEAR(lb_naive_mc(std::span(&over, 1), 0.5), std::log(8.0 / 3.0), 1e-14);
  EXPECT_NEAR(lb_naive_mc(std::span(&over, 1), 0.5), 0.98083, 1e-5);
  EXPECT_NEAR(lb_naive_mc(std::span(&between, 1), 0.5), std::log(0.5 / 0.75), 1e-14);
  EXPECT_NEAR(lb_naive_mc(std::span(&between, 1), 0.5), -0.40546, 1e-5);
  EXPECT_NEAR(lb_naive_mc(std::span(&over, 1), 1.0), -std::log(0.75), 1e-14);
  EXPECT_GE(lb_naive_mc(std::span(&between, 1), 1.0), 0.0);
}

TEST(NaiveBound, LambdaOutOfRange) {
  const Term t = term(0.25, 0.75, true, true);
  EXPECT_THROW(lb_naive_mc(std::span(&t, 1), 0.0), std::invalid_argument);
  EXPECT_THROW(lb_naive_mc(std::span(&t, 1), 1.5), std::invalid_argument);
  EXPECT_THROW(lb_map(std::span(&t, 1), -0.1), std::invalid_argument);
}

TEST(NaiveBound, OutsideSamplesHitTheFloor) {
  const Term t = term(0.25, 0.75, false, false);
  EXPECT_DOUBLE_EQ(lb_naive_mc(std::span(&t, 1), 0.3), std::log(kLogFloor));
}

TEST(ThetaMap, Examples) {
  EXPECT_NEAR(theta_map(0.8, true), 0.9, 1e-15);
  EXPECT_NEAR(theta_map(1.0 / 3.0, false), 1.0 / 6.0, 1e-15);
  EXPECT_EQ(theta_map(0.37, true, 0.0), 1.0);
  EXPECT_EQ(theta_map(0.37, false, 0.0), 0.0);
}

TEST(MapBound, WorkedExample) {
  const Term t = term(0.25, 0.75, true, true);
  const double expected = (2.0 / 3.0) * std::log(8.0 / 3.0) + (1.0 / 3.0) * std::log(2.0 / 3.0);
  EXPECT_NEAR(lb_map(std::span(&t, 1), 0.5), expected, 1e-14);
  EXPECT_NEAR(expected, 0.51873, 1e-5);
}

TEST(MapBound, DivergesAsLambdaVanishes) {
  const Term t = term(0.25, 0.75, true, true);
  const std::span s(&t, 1);
  EXPECT_LT(lb_map(s, 1e-6), lb_map(s, 1e-3));
  EXPECT_LT(lb_map(s, 1e-9), lb_map(s, 1e-6));
  EXPECT_LT(lb_map(s, 1e-12), lb_map(s, 1e-9));
}

TEST(MapBound, ZeroPriorWeightIsNaive) {
  std::mt19937_64 rng(1);
  for (int inst = 0; inst < 50; ++inst) {
    auto terms = instances::random_terms(10, rng);
    terms[0].in_under = inst % 2 == 0;  // include a floored sample now and then
    for (double lambda : LambdaPolicy::default_grid()) EXPECT_EQ(lb_map(terms, lambda, 0.0), lb_naive_mc(terms, lambda));
  }
}

TEST(Estimators, ConcaveInLambda) {
  std::mt19937_64 rng(2);
  for (int inst = 0; inst < 100; ++inst) {
    const auto terms = instances::random_terms(10, rng);
    EXPECT_LE(worst_convexity(grid_values(terms, Estimator::kNaiveMc)), 1e-10);
    EXPECT_LE(worst_convexity(grid_values(terms, Estimator::kMap)), 1e-10);
  }
}

TEST(Estimators, PermutationInvariant) {
  std::mt19937_64 rng(3);
  auto terms = instances::random_terms(10, rng);
  const double naive = lb_naive_mc(terms, 0.4);
  const double map = lb_map(terms, 0.4);
  std::reverse(terms.begin(), terms.end());
  std::swap(terms[2], terms[7]);
  EXPECT_NEAR(lb_naive_mc(terms, 0.4), naive, 1e-13);
  EXPECT_NEAR(lb_map(terms, 0.4), map, 1e-13);
}

TEST(OptimizeLambda, DominatesGridAndPiBound) {
  std::mt19937_64 rng(4);
  for (int inst = 0; inst < 100; ++inst) {
    const auto terms = instances::random_terms(10, rng);
    const double pi = pi_lower_bound(terms);
    EXPECT_GT(pi, 0.0);
    for (Estimator est : {Estimator::kNaiveMc, Estimator::kMap}) {
      const LambdaChoice best = optimize_lambda(terms, LambdaPolicy{}, est);
      for (double v : grid_values(terms, est)) EXPECT_GE(best.value, v);
      EXPECT_GE(best.value, pi);
    }
    LambdaPolicy refined;
    refined.refine = true;
    EXPECT_GE(optimize_lambda(terms, refined, Estimator::kMap).value,
              optimize_lambda(terms, LambdaPolicy{}, Estimator::kMap).value);
  }
}

TEST(PiBound, Examples) {
  const Term t = term(0.25, 0.75, true, true);
  EXPECT_DOUBLE_EQ(pi_lower_bound(std::span(&t, 1)), 0.25);
  const Term hopeless = term(0.9, 1.0 - 1e-16, true, true);
  EXPECT_GT(pi_lower_bound(std::span(&hopeless, 1)), 0.0);
  EXPECT_LT(pi_lower_bound(std::span(&hopeless, 1)), 1e-15);
}

TEST(PrepareSamples, EntriesAreFrontiers) {
  const Fixture fx(1);
  ASSERT_EQ(fx.samples.size(), 10);
  for (const auto& e : fx.samples.entries) {
    EXPECT_TRUE(e.frontier.is_valid());
    EXPECT_FALSE(e.frontier.empty());
  }
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    for (const Term& term : evaluate_terms(fx.random_point(rng), fx.samples, fx.gps)) {
      EXPECT_LE(term.z_over, term.z_under);
      if (term.in_over) EXPECT_TRUE(term.in_under);
    }
  }
}

TEST(PrepareSamples, Deterministic) {
  const Fixture a(2, 3);
  const Fixture b(2, 3);
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(a.samples.entries[k].frontier.points, b.samples.entries[k].frontier.points);
    EXPECT_EQ(a.samples.entries[k].path.weights(0), b.samples.entries[k].path.weights(0));
  }
}

TEST(Cmi, EmptyBatchIsSingleQuery) {
  const Fixture fx(3);
  const FantasySet none(fx.gps, fx.samples, Matrix(0, 2));
  std::mt19937_64 rng(6);
  for (int t = 0; t < 10; ++t) {
    const Vector x = fx.random_point(rng);
    const LambdaChoice a = cmi_parallel(x, none, fx.samples, fx.gps, LambdaPolicy{});
    const LambdaChoice b = optimize_lambda(x, fx.samples, fx.gps, LambdaPolicy{}, Estimator::kMap);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.lambda, b.lambda);
  }
}

TEST(Cmi, PendingPointCollapsesToFantasy) {
  const Fixture fx(4);
  std::mt19937_64 rng(7);
  const Vector xp = fx.random_point(rng);
  const FantasySet fantasies(fx.gps, fx.samples, Matrix(xp.transpose()));
  const auto terms = evaluate_terms(xp, fx.samples, fx.gps, fantasies);
  for (int k = 0; k < fx.samples.size(); ++k) {
    const auto& entry = fx.samples.entries[static_cast<std::size_t>(k)];
    const gp::Prediction pred = fantasies.posterior(k, fx.gps).predict(xp);
    const Vector fantasy = entry.path.evaluate(xp);
    for (int l = 0; l < 2; ++l) {
      EXPECT_LT(pred.variance[l], 2e-4);
      EXPECT_NEAR(pred.mean[l], fantasy[l], 0.05);
    }
    // Compare against membership only where the fantasy is clear of the boundary.
    const Vector margin = 6.0 * pred.stddev() + Vector::Constant(2, 0.05);
    const Matrix& F = entry.frontier.points;
    if (geometry::in_dominated_region(F, fantasy + margin)) EXPECT_GT(terms[k].z_over, 0.99);
    if (!geometry::in_dominated_region(F, fantasy - margin)) EXPECT_LT(terms[k].z_over, 0.01);
  }
}

TEST(Cmi, PendingPointCarriesLittleInformation) {
  int ok = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const Fixture fx(20 + inst);
    std::mt19937_64 rng(inst);
    const Vector xp = fx.random_point(rng);
    const FantasySet fantasies(fx.gps, fx.samples, Matrix(xp.transpose()));
    const double at_pending = cmi_parallel(xp, fantasies, fx.samples, fx.gps, LambdaPolicy{}).value;
    double best = -kInf;
    for (int c = 0; c < 50; ++c)
      best = std::max(best, cmi_parallel(fx.random_point(rng), fantasies, fx.samples, fx.gps, LambdaPolicy{}).value);
    ok += at_pending <= best;
  }
  EXPECT_GE(ok, 9);
}

TEST(Noisy, ConditionalArithmetic) {
  gp::Prediction pred{Vector::Zero(1), Vector::Ones(1)};
  const NoisyConditional c = noisy_conditional(pred, Vector::Constant(1, 2.0), 1.0);
  EXPECT_NEAR(c.mean[0], 1.0, 1e-15);
  EXPECT_NEAR(c.variance[0], 0.5, 1e-15);
}

TEST(Noisy, PartitionSumsToOne) {
  const Fixture fx(5, 4);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  for (int t = 0; t < 20; ++t) {
    const Vector x = fx.random_point(rng);
    const gp::Prediction pred = fx.gps.predict(x);
    Vector y(2);
    y << pred.mean[0] + z(rng), pred.mean[1] + z(rng);
    for (const auto& e : fx.samples.entries) {
      const NoisyProbabilities p = noisy_probabilities(e, noisy_conditional(pred, y, 0.3));
      EXPECT_NEAR(p.over + p.between + p.dominating, 1.0, 1e-10);
      EXPECT_GE(p.over, 0.0);
      EXPECT_GE(p.between, 0.0);
      EXPECT_GE(p.dominating, 0.0);
    }
  }
}

TEST(Noisy, VanishingNoiseRecoversNaive) {
  const Fixture fx(6);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 10; ++t) {
    const Vector x = fx.random_point(rng);
    for (double lambda : {0.1, 0.5, 1.0}) {
      EXPECT_NEAR(lb_noisy(x, lambda, fx.samples, fx.gps, 1e-12, 4, 11), lb_naive_mc(x, lambda, fx.samples, fx.gps),
                  1e-3);
    }
  }
}

TEST(ExpectedImprovement, DegenerateSpread) {
  EXPECT_DOUBLE_EQ(expected_improvement(1.5, 0.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(expected_improvement(0.5, 0.0, 1.0), 0.0);
}

TEST(ExpectedImprovement, MatchesMonteCarlo) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int inst = 0; inst < 5; ++inst) {
    const double mean = z(rng);
    const double sd = u(rng);
    const double best = z(rng);
    const int n = 1'000'000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double gain = std::max(mean + sd * z(rng) - best, 0.0);
      sum += gain;
      sq += gain * gain;
    }
    const double m = sum / n;
    const double se = std::sqrt((sq / n - m * m) / n);
    EXPECT_NEAR(expected_improvement(mean, sd, best), m, 3.0 * se);
  }
}

TEST(Parego, CornerWeightPicksFirstObjective) {
  Vector f(3), w(3);
  f << -0.3, -0.8, -0.1;
  w << 1.0, 0.0, 0.0;
  EXPECT_NEAR(tchebycheff(f, w, 0.05), f[0] + 0.05 * f[0], 1e-15);
}

TEST(Parego, DirichletOnSimplex) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const Vector w = dirichlet_weights(4, rng);
    EXPECT_NEAR(w.sum(), 1.0, 1e-12);
    EXPECT_GE(w.minCoeff(), 0.0);
  }
}

TEST(Parego, ModelAcquisitionIsFinite) {
  const Fixture fx(7, 1);
  gp::Dataset data(2, 2);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 6; ++i) {
    const Vector x = fx.random_point(rng);
    data.append(x, fx.samples.entries[0].path.evaluate(x));
  }
  const ParegoModel model = make_parego_model(data, fx.domain, dirichlet_weights(2, rng), 0.05);
  for (int t = 0; t < 10; ++t) {
    const double a = model.acquisition(fx.random_point(rng));
    EXPECT_TRUE(std::isfinite(a));
    EXPECT_GE(a, 0.0);
  }
}
