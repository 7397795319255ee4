#pragma once

#include <functional>

#include "pfev/common.hpp"

namespace pfev::direct {

struct Config {
  int max_evaluations = 600;
  int max_iterations = 1'000'000;
  double epsilon = 1e-4;

  void validate() const;
  /// Default evaluation budget 200 (d + 1).
  static Config for_dimension(int d);
};

struct Result {
  Vector x;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
};

/// Deterministic DIRECT (dividing rectangles) maximization of `f` over `domain`.
/// The evaluation count never exceeds cfg.max_evaluations.
Result maximize(const std::function<double(const Vector&)>& f, const Box& domain, const Config& cfg);

}  // namespace pfev::direct
