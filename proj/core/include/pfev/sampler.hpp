#pragma once

#include <cstdint>
#include <vector>

#include "pfev/common.hpp"
#include "pfev/gp.hpp"

namespace pfev::sampler {

/// Random-feature approximation of one objective:
/// f(x) = sum_j weights_j * scale * cos(frequencies_j . x + phases_j).
struct FeatureMap {
  Matrix frequencies;  // D x d, rows ~ N(0, I / l^2)
  Vector phases;       // D, ~ U[0, 2 pi)
  double scale = 0.0;  // sqrt(2 s2 / D)

  int num_features() const { return static_cast<int>(phases.size()); }
  int input_dim() const { return static_cast<int>(frequencies.cols()); }
  /// Feature vector phi(x) of length D.
  Vector features(const Vector& x) const;
  /// Rows are phi(x_i)^T for the rows x_i of `inputs`.
  Matrix design(const Matrix& inputs) const;
};

FeatureMap draw_feature_map(const gp::KernelParams& params, int input_dim, int num_features,
                            std::uint64_t seed);

/// One joint sample of all L objectives. Immutable and cheap to evaluate.
class SampledPath {
 public:
  SampledPath() = default;
  SampledPath(std::vector<FeatureMap> maps, std::vector<Vector> weights);

  int num_objectives() const { return static_cast<int>(maps_.size()); }
  int input_dim() const { return maps_.empty() ? 0 : maps_.front().input_dim(); }

  /// Throws std::invalid_argument on dimension mismatch.
  Vector evaluate(const Vector& x) const;
  /// Row i of the result is evaluate(row i of `inputs`), bit-for-bit.
  Matrix evaluate_batch(const Matrix& inputs) const;

  const FeatureMap& feature_map(int l) const { return maps_.at(static_cast<std::size_t>(l)); }
  const Vector& weights(int l) const { return weights_.at(static_cast<std::size_t>(l)); }

 private:
  void evaluate_into(const double* x, Eigen::Index stride, double* out, Eigen::Index out_stride,
                     Vector& scratch) const;

  std::vector<FeatureMap> maps_;
  std::vector<Vector> weights_;
};

/// Draws weights from the Bayesian linear model posterior implied by the
/// feature design on the training data of each GP:
/// mean (Phi^T Phi + s I)^-1 Phi^T y, covariance s (Phi^T Phi + s I)^-1,
/// with s the GP noise variance. Throws NumericalError if the weight
/// posterior cannot be factorized.
SampledPath draw_path(const gp::IndependentGps& gps, int num_features, std::uint64_t seed);

/// Prior sample path (no conditioning) with per-objective kernel params.
SampledPath draw_prior_path(const std::vector<gp::KernelParams>& params, int input_dim, int num_features,
                            std::uint64_t seed);

}  // namespace pfev::sampler
