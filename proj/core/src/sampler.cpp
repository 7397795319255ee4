#include "pfev/sampler.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>

#include "pfev/normal.hpp"

namespace pfev::sampler {

namespace {

Vector standard_normal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

Eigen::LLT<Matrix> checked_llt(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().array() > 0.0).all()) {
    throw NumericalError(std::string("weight posterior factorization failed (") + what + ")");
  }
  return llt;
}

// Exact draw from N(m, s (Phi^T Phi + s I)^-1) for a standard normal prior on
// the weights.
Vector posterior_weights(const Matrix& design, const Vector& targets, double noise, std::mt19937_64& rng) {
  const int n = static_cast<int>(design.rows());
  const int num_features = static_cast<int>(design.cols());
  Vector prior = standard_normal(num_features, rng);
  if (n == 0) return prior;

  if (n < num_features) {
    // Pathwise update: w = w0 + Phi^T (Phi Phi^T + s I)^-1 (y - Phi w0 - e),
    // e ~ N(0, s I). Exact in distribution and costs O(n^2 D) instead of O(D^3).
    Matrix gram = design * design.transpose();
    gram.diagonal().array() += noise;
    const auto llt = checked_llt(gram, "dual");
    const Vector eps = std::sqrt(noise) * standard_normal(n, rng);
    const Vector resid = targets - design * prior - eps;
    return prior + design.transpose() * llt.solve(resid);
  }

  Matrix precision = design.transpose() * design;
  precision.diagonal().array() += noise;
  const auto llt = checked_llt(precision, "primal");
  const Vector mean = llt.solve(design.transpose() * targets);
  // precision = R R^T, so s R^-T R^-1 = s precision^-1.
  const Vector z = standard_normal(num_features, rng);
  const Vector offset = llt.matrixU().solve(z);
  return mean + std::sqrt(noise) * offset;
}

}  // namespace

Vector FeatureMap::features(const Vector& x) const {
  require(x.size() == frequencies.cols(), "FeatureMap::features: dimension mismatch");
  Vector z = phases;
  for (Eigen::Index k = 0; k < frequencies.cols(); ++k) z += frequencies.col(k) * x[k];
  cos_inplace(z.data(), z.size());
  return scale * z;
}

Matrix FeatureMap::design(const Matrix& inputs) const {
  Matrix phi(inputs.rows(), phases.size());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) phi.row(i) = features(inputs.row(i).transpose()).transpose();
  return phi;
}

FeatureMap draw_feature_map(const gp::KernelParams& params, int input_dim, int num_features, std::uint64_t seed) {
  require(num_features >= 1, "draw_feature_map: need at least one feature");
  require(params.length_scale > 0.0, "draw_feature_map: length scale must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / params.length_scale);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  FeatureMap map;
  map.frequencies.resize(num_features, input_dim);
  map.phases.resize(num_features);
  for (int j = 0; j < num_features; ++j) {
    for (int k = 0; k < input_dim; ++k) map.frequencies(j, k) = normal(rng);
    map.phases[j] = uniform(rng);
  }
  map.scale = std::sqrt(2.0 * params.signal_variance / num_features);
  return map;
}

SampledPath::SampledPath(std::vector<FeatureMap> maps, std::vector<Vector> weights)
    : maps_(std::move(maps)), weights_(std::move(weights)) {
  require(maps_.size() == weights_.size(), "SampledPath: one weight vector per feature map");
  for (std::size_t l = 0; l < maps_.size(); ++l) {
    require(weights_[l].size() == maps_[l].phases.size(), "SampledPath: weight length mismatch");
    require(maps_[l].input_dim() == maps_.front().input_dim(), "SampledPath: input dimension mismatch");
  }
}

void SampledPath::evaluate_into(const double* x, Eigen::Index stride, double* out, Eigen::Index out_stride,
                                Vector& scratch) const {
  for (std::size_t l = 0; l < maps_.size(); ++l) {
    const FeatureMap& map = maps_[l];
    scratch = map.phases;
    for (Eigen::Index k = 0; k < map.frequencies.cols(); ++k) scratch += map.frequencies.col(k) * x[k * stride];
    cos_inplace(scratch.data(), scratch.size());
    out[static_cast<Eigen::Index>(l) * out_stride] = map.scale * weights_[l].dot(scratch);
  }
}

Vector SampledPath::evaluate(const Vector& x) const {
  require(x.size() == input_dim(), "SampledPath::evaluate: dimension mismatch");
  Vector out(num_objectives());
  Vector scratch;
  evaluate_into(x.data(), 1, out.data(), 1, scratch);
  return out;
}

Matrix SampledPath::evaluate_batch(const Matrix& inputs) const {
  require(inputs.cols() == input_dim(), "SampledPath::evaluate_batch: dimension mismatch");
  Matrix out(inputs.rows(), num_objectives());
  Vector scratch;
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    evaluate_into(inputs.data() + i, inputs.rows(), out.data() + i, out.rows(), scratch);
  }
  return out;
}

SampledPath draw_path(const gp::IndependentGps& gps, int num_features, std::uint64_t seed) {
  require(num_features >= 1, "draw_path: need at least one feature");
  std::vector<FeatureMap> maps;
  std::vector<Vector> weights;
  for (int l = 0; l < gps.num_objectives(); ++l) {
    const gp::GpPosterior& g = gps.objective(l);
    FeatureMap map = draw_feature_map(g.params(), gps.input_dim(), num_features, derive_seed(seed, 2 * l));
    std::mt19937_64 rng(derive_seed(seed, 2 * l + 1));
    const Matrix design = map.design(g.inputs());
    weights.push_back(posterior_weights(design, g.targets(), g.params().noise_variance, rng));
    maps.push_back(std::move(map));
  }
  return SampledPath(std::move(maps), std::move(weights));
}

SampledPath draw_prior_path(const std::vector<gp::KernelParams>& params, int input_dim, int num_features,
                            std::uint64_t seed) {
  std::vector<FeatureMap> maps;
  std::vector<Vector> weights;
  for (std::size_t l = 0; l < params.size(); ++l) {
    maps.push_back(draw_feature_map(params[l], input_dim, num_features, derive_seed(seed, 2 * l)));
    std::mt19937_64 rng(derive_seed(seed, 2 * l + 1));
    weights.push_back(standard_normal(num_features, rng));
  }
  return SampledPath(std::move(maps), std::move(weights));
}

}  // namespace pfev::sampler
