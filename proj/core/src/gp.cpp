#include "pfev/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace pfev::gp {

namespace {

struct Factorization {
  Matrix lower;
  double jitter = 0.0;
};

Factorization factorize(Matrix gram, double noise_variance) {
  const Eigen::Index n = gram.rows();
  gram.diagonal().array() += noise_variance;
  if (n == 0) return {Matrix(0, 0), 0.0};

  std::vector<double> attempted;
  double jitter = 0.0;
  while (true) {
    Matrix shifted = gram;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(shifted);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
      const auto diag = llt.matrixLLT().diagonal();
      ok = (diag.array() > 0.0).all() && diag.allFinite();
    }
    if (ok) return {Matrix(llt.matrixL()), jitter};
    attempted.push_back(jitter);
    jitter = (jitter == 0.0) ? kFirstJitter : jitter * 10.0;
    if (jitter > kMaxJitter * 1.0000001) break;
  }
  std::ostringstream msg;
  msg << "GP factorization failed at jitter levels:";
  for (double j : attempted) msg << ' ' << j;
  throw NumericalError(msg.str());
}

double squared_distance(const double* a, const double* b, Eigen::Index dim, Eigen::Index stride_a,
                        Eigen::Index stride_b) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double diff = a[k * stride_a] - b[k * stride_b];
    s += diff * diff;
  }
  return s;
}

}  // namespace

double kernel_eval(const KernelParams& params, const Vector& x, const Vector& x2) {
  require(x.size() == x2.size(), "kernel_eval: dimension mismatch");
  const double r2 = (x - x2).squaredNorm();
  return params.signal_variance * std::exp(-r2 / (2.0 * params.length_scale * params.length_scale));
}

Matrix kernel_matrix(const KernelParams& params, const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "kernel_matrix: dimension mismatch");
  const double scale = -1.0 / (2.0 * params.length_scale * params.length_scale);
  Matrix k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const double r2 = squared_distance(a.data() + i, b.data() + j, a.cols(), a.rows(), b.rows());
      k(i, j) = params.signal_variance * std::exp(r2 * scale);
    }
  }
  return k;
}

Dataset::Dataset(Matrix x, Matrix y) : inputs(std::move(x)), outputs(std::move(y)) {
  require(inputs.rows() == outputs.rows(), "Dataset: inputs and outputs differ in length");
}

void Dataset::append(const Vector& x, const Vector& y) {
  require(x.size() == inputs.cols() && y.size() == outputs.cols(), "Dataset::append: dimension mismatch");
  inputs.conservativeResize(inputs.rows() + 1, Eigen::NoChange);
  outputs.conservativeResize(outputs.rows() + 1, Eigen::NoChange);
  inputs.row(inputs.rows() - 1) = x.transpose();
  outputs.row(outputs.rows() - 1) = y.transpose();
}

void Dataset::check_inside(const Box& domain) const {
  require(domain.dim() == input_dim(), "Dataset: domain dimension mismatch");
  for (int i = 0; i < size(); ++i) {
    require(domain.contains(inputs.row(i).transpose(), 1e-12), "Dataset: input outside domain");
  }
}

GpPosterior::GpPosterior(const KernelParams& params, Matrix inputs, Vector targets)
    : params_(params), inputs_(std::move(inputs)), targets_(std::move(targets)) {
  require(params_.length_scale > 0.0 && params_.noise_variance > 0.0,
          "GpPosterior: length scale and noise variance must be positive");
  require(inputs_.rows() == targets_.size(), "GpPosterior: inputs and targets differ in length");
  Factorization f = factorize(kernel_matrix(params_, inputs_, inputs_), params_.noise_variance);
  factor_ = std::move(f.lower);
  jitter_ = f.jitter;
  const Eigen::Index n = inputs_.rows();
  if (n == 0) {
    alpha_ = Vector(0);
    log_marginal_likelihood_ = 0.0;
    return;
  }
  const Vector half = factor_.triangularView<Eigen::Lower>().solve(targets_);
  alpha_ = factor_.triangularView<Eigen::Lower>().transpose().solve(half);
  log_marginal_likelihood_ = -0.5 * half.squaredNorm() - factor_.diagonal().array().log().sum() -
                             0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

Moments GpPosterior::predict(const Vector& x) const {
  require(x.size() == inputs_.cols() || inputs_.rows() == 0, "GpPosterior::predict: dimension mismatch");
  if (inputs_.rows() == 0) return {0.0, params_.signal_variance};
  const Matrix kx = kernel_matrix(params_, inputs_, x.transpose());
  const Vector k = kx.col(0);
  Moments m;
  m.mean = k.dot(alpha_);
  const Vector v = factor_.triangularView<Eigen::Lower>().solve(k);
  m.variance = std::clamp(params_.signal_variance - v.squaredNorm(), kVarianceFloor, params_.signal_variance);
  return m;
}

GpPosterior GpPosterior::with_observations(const Matrix& extra_inputs, const Vector& extra_targets) const {
  require(extra_inputs.rows() == extra_targets.size(), "with_observations: length mismatch");
  if (extra_inputs.rows() == 0) return *this;
  Matrix x(inputs_.rows() + extra_inputs.rows(), extra_inputs.cols());
  if (inputs_.rows() > 0) x.topRows(inputs_.rows()) = inputs_;
  x.bottomRows(extra_inputs.rows()) = extra_inputs;
  Vector y(targets_.size() + extra_targets.size());
  y << targets_, extra_targets;
  return GpPosterior(params_, std::move(x), std::move(y));
}

IndependentGps::IndependentGps(std::vector<GpPosterior> objectives) : objectives_(std::move(objectives)) {
  require(!objectives_.empty(), "IndependentGps: need at least one objective");
}

int IndependentGps::input_dim() const { return static_cast<int>(objectives_.front().inputs().cols()); }

int IndependentGps::num_observations() const { return objectives_.front().size(); }

Prediction IndependentGps::predict(const Vector& x) const {
  Prediction p{Vector(num_objectives()), Vector(num_objectives())};
  for (int l = 0; l < num_objectives(); ++l) {
    const Moments m = objectives_[static_cast<std::size_t>(l)].predict(x);
    p.mean[l] = m.mean;
    p.variance[l] = m.variance;
  }
  return p;
}

IndependentGps IndependentGps::with_observations(const Matrix& extra_inputs, const Matrix& extra_targets) const {
  require(extra_targets.cols() == num_objectives(), "with_observations: objective count mismatch");
  std::vector<GpPosterior> out;
  out.reserve(objectives_.size());
  for (int l = 0; l < num_objectives(); ++l) {
    out.push_back(objectives_[static_cast<std::size_t>(l)].with_observations(extra_inputs, extra_targets.col(l)));
  }
  return IndependentGps(std::move(out));
}

double log_marginal_likelihood(const KernelParams& params, const Matrix& inputs, const Vector& targets) {
  return GpPosterior(params, inputs, targets).log_marginal_likelihood();
}

double fit_length_scale(const Matrix& inputs, const Vector& targets, const FitOptions& options) {
  require(options.grid_points >= 2, "fit_length_scale: need at least two grid points");
  require(options.min_length_scale > 0.0 && options.max_length_scale > options.min_length_scale,
          "fit_length_scale: invalid search interval");
  const double lo = std::log(options.min_length_scale);
  const double hi = std::log(options.max_length_scale);

  auto score = [&](double log_len) {
    KernelParams p{std::exp(log_len), options.signal_variance, options.noise_variance};
    try {
      return log_marginal_likelihood(p, inputs, targets);
    } catch (const NumericalError&) {
      return -kInf;
    }
  };

  const int m = options.grid_points;
  std::vector<double> grid(static_cast<std::size_t>(m));
  std::vector<double> values(static_cast<std::size_t>(m));
  int best = 0;
  for (int i = 0; i < m; ++i) {
    grid[i] = lo + (hi - lo) * i / (m - 1);
    values[i] = score(grid[i]);
    if (values[i] > values[best]) best = i;
  }
  if (!std::isfinite(values[best])) throw NumericalError("fit_length_scale: evidence not finite anywhere on the grid");

  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, m - 1)];
  constexpr double kInvPhi = 0.61803398874989484820;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = score(c);
  double fd = score(d);
  for (int it = 0; it < options.golden_iterations; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = score(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = score(d);
    }
  }
  double best_log = grid[best];
  double best_value = values[best];
  if (fc > best_value) {
    best_log = c;
    best_value = fc;
  }
  if (fd > best_value) best_log = d;
  return std::exp(best_log);
}

IndependentGps fit(const Dataset& data, const Box& domain, const FitOptions& options) {
  require(data.size() >= 1, "gp::fit: empty dataset");
  require(options.noise_variance > 0.0, "gp::fit: noise variance must be positive");
  data.check_inside(domain);
  std::vector<GpPosterior> gps;
  gps.reserve(static_cast<std::size_t>(data.output_dim()));
  for (int l = 0; l < data.output_dim(); ++l) {
    const Vector y = data.outputs.col(l);
    const double len = fit_length_scale(data.inputs, y, options);
    gps.emplace_back(KernelParams{len, options.signal_variance, options.noise_variance}, data.inputs, y);
  }
  return IndependentGps(std::move(gps));
}

}  // namespace pfev::gp
