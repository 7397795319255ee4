#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pfev/common.hpp"

namespace pfev::studies {

/// Over- and under-truncation volumes of a frontier sampled uniformly on the
/// unit simplex, inside [0, 1]^L.
struct GapRow {
  int L = 0;
  int size = 0;
  std::uint64_t seed = 0;
  double over_volume = 0.0;
  double under_volume = 0.0;
  double true_volume = 0.0;  // 1 / L!
  double over_ratio = 0.0;
  double under_ratio = 0.0;
};

GapRow gap_instance(int L, int size, std::uint64_t seed);
std::vector<GapRow> gap_study(int L, const std::vector<int>& sizes, const std::vector<std::uint64_t>& seeds);

/// Uniform draws from the unit simplex (rows).
Matrix simplex_points(int L, int n, std::uint64_t seed);

/// Accuracy of the lower-bound estimators on a one-dimensional,
/// two-objective toy problem, against a large-sample naive estimate.
struct EstimatorStudyConfig {
  int num_seeds = 50;
  std::uint64_t base_seed = 0;
  std::vector<int> sample_sizes{10, 100, 1000};
  int ground_truth_samples = 100000;
  int num_candidates = 100;
  int num_solver_points = 200;
  int max_frontier = 50;
  int training_points = 5;
  double length_scale = 0.1;
  double noise_variance = 1e-4;
};

struct EstimatorRow {
  std::string estimator;  // naive | map-r1 | map-rsqrt
  int K = 0;
  double r = 0.0;
  double mse_mean = 0.0;
  double mse_sd = 0.0;
  int seeds = 0;
};

/// Per-seed squared errors averaged over the candidate grid; one row per
/// (estimator, K) with the mean and standard deviation across seeds.
std::vector<EstimatorRow> estimator_study(const EstimatorStudyConfig& cfg);

}  // namespace pfev::studies
