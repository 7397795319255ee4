#pragma once

#include <cstdint>
#include <functional>

#include "pfev/common.hpp"
#include "pfev/pareto.hpp"

namespace pfev::nsga2 {

/// Maps an N x d matrix of inputs to an N x L matrix of objective values
/// (maximized). Must be pure.
using BatchObjective = std::function<Matrix(const Matrix&)>;
using PointObjective = std::function<Vector(const Vector&)>;

struct Config {
  int population = 50;
  int generations = 1000;
  double crossover_prob = 0.9;
  double crossover_eta = 15.0;
  /// Per-variable mutation probability; values <= 0 mean 1/d.
  double mutation_prob = -1.0;
  double mutation_eta = 20.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument unless population is even and >= 4 and
  /// generations >= 1.
  void validate() const;
};

/// Fronts of a fast non-dominated sort (maximization); front 0 is the
/// non-dominated set.
std::vector<std::vector<int>> non_dominated_sort(const Matrix& values);

/// Crowding distance of each member of `front` (boundary members get +inf).
std::vector<double> crowding_distance(const Matrix& values, const std::vector<int>& front);

/// Non-dominated subset of the final population, with inputs attached.
ParetoSet solve(const BatchObjective& objective, const Box& domain, const Config& config);
ParetoSet solve(const PointObjective& objective, const Box& domain, const Config& config);

}  // namespace pfev::nsga2
