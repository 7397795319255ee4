#pragma once

#include <vector>

#include <Eigen/Cholesky>

#include "pfev/common.hpp"

namespace pfev::gp {

/// Isotropic RBF kernel k(x, x') = s2 * exp(-|x - x'|^2 / (2 l^2)) plus
/// homoscedastic observation noise.
struct KernelParams {
  double length_scale = 0.1;
  double signal_variance = 1.0;
  double noise_variance = 1e-4;
};

/// Throws std::invalid_argument when x and x2 differ in dimension.
double kernel_eval(const KernelParams& params, const Vector& x, const Vector& x2);

/// Cross-covariance between the rows of a (n x d) and b (m x d).
Matrix kernel_matrix(const KernelParams& params, const Matrix& a, const Matrix& b);

/// Training data; row i of `inputs` is paired with row i of `outputs`.
struct Dataset {
  Matrix inputs;   // n x d
  Matrix outputs;  // n x L

  Dataset() = default;
  Dataset(int input_dim, int output_dim) : inputs(0, input_dim), outputs(0, output_dim) {}
  Dataset(Matrix x, Matrix y);

  int size() const { return static_cast<int>(inputs.rows()); }
  int input_dim() const { return static_cast<int>(inputs.cols()); }
  int output_dim() const { return static_cast<int>(outputs.cols()); }
  void append(const Vector& x, const Vector& y);
  /// Throws std::invalid_argument when an input falls outside `domain`.
  void check_inside(const Box& domain) const;
};

/// Jitter escalation used when K + noise I fails to factorize.
inline constexpr double kFirstJitter = 1e-10;
inline constexpr double kMaxJitter = 1e-4;
/// Lower clamp on predictive variances.
inline constexpr double kVarianceFloor = 1e-12;

struct Moments {
  double mean = 0.0;
  double variance = 1.0;
};

/// Zero-mean GP posterior of a single objective.
class GpPosterior {
 public:
  GpPosterior() = default;
  /// Factorizes K + noise I. Throws NumericalError if every jitter level fails.
  GpPosterior(const KernelParams& params, Matrix inputs, Vector targets);

  Moments predict(const Vector& x) const;
  double log_marginal_likelihood() const { return log_marginal_likelihood_; }

  /// Posterior after appending (extra_inputs, extra_targets) with the same
  /// kernel parameters; no refit.
  GpPosterior with_observations(const Matrix& extra_inputs, const Vector& extra_targets) const;

  const KernelParams& params() const { return params_; }
  const Matrix& inputs() const { return inputs_; }
  const Vector& targets() const { return targets_; }
  const Vector& alpha() const { return alpha_; }
  /// Lower-triangular factor of K + (noise + jitter) I.
  const Matrix& factor() const { return factor_; }
  double jitter() const { return jitter_; }
  int size() const { return static_cast<int>(inputs_.rows()); }

 private:
  KernelParams params_;
  Matrix inputs_;
  Vector targets_;
  Matrix factor_;
  Vector alpha_;
  double jitter_ = 0.0;
  double log_marginal_likelihood_ = 0.0;
};

/// Per-objective predictive moments at one input.
struct Prediction {
  Vector mean;
  Vector variance;
  Vector stddev() const { return variance.array().sqrt().matrix(); }
};

/// L independent GPs over a shared input set.
class IndependentGps {
 public:
  IndependentGps() = default;
  explicit IndependentGps(std::vector<GpPosterior> objectives);

  Prediction predict(const Vector& x) const;
  int num_objectives() const { return static_cast<int>(objectives_.size()); }
  int input_dim() const;
  int num_observations() const;
  const GpPosterior& objective(int l) const { return objectives_.at(static_cast<std::size_t>(l)); }
  const std::vector<GpPosterior>& objectives() const { return objectives_; }

  /// Conditions every objective on extra rows (n_q x d) with targets
  /// (n_q x L), keeping hyper-parameters fixed.
  IndependentGps with_observations(const Matrix& extra_inputs, const Matrix& extra_targets) const;

 private:
  std::vector<GpPosterior> objectives_;
};

struct FitOptions {
  double noise_variance = 1e-4;
  double signal_variance = 1.0;
  double min_length_scale = 1e-2;
  double max_length_scale = 1.0;
  int grid_points = 25;
  int golden_iterations = 40;
};

/// Log evidence log p(y | X, params); throws NumericalError on factorization failure.
double log_marginal_likelihood(const KernelParams& params, const Matrix& inputs, const Vector& targets);

/// Length scale maximizing the evidence: log-spaced grid, then golden-section
/// search on the bracket around the best grid point.
double fit_length_scale(const Matrix& inputs, const Vector& targets, const FitOptions& options);

/// Fits one GP per output column. Requires a non-empty dataset inside `domain`.
IndependentGps fit(const Dataset& data, const Box& domain, const FitOptions& options = {});

}  // namespace pfev::gp
