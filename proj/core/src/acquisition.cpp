#include "pfev/acquisition.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "pfev/normal.hpp"

namespace pfev::acquisition {

namespace {

void check_lambda(double lambda) {
  require(lambda > 0.0 && lambda <= 1.0, "lambda must lie in (0, 1]");
}

double estimate(std::span<const Term> terms, double lambda, Estimator estimator, double r) {
  return estimator == Estimator::kMap ? lb_map(terms, lambda, r) : lb_naive_mc(terms, lambda);
}

Term make_term(const SampleEntry& entry, const Vector& fx, const Vector& mean, const Vector& stddev) {
  const auto q = geometry::truncation_quantities(entry.over, entry.flipped, mean, stddev);
  Term t;
  t.z_over = q.z_over;
  t.z_under = q.z_under;
  t.in_over = geometry::in_dominated_region(entry.frontier.points, fx);
  t.in_under = !geometry::in_dominating_region(entry.frontier.points, fx);
  return t;
}

}  // namespace

SampleEntry make_entry(ParetoSet frontier, sampler::SampledPath path, std::size_t max_cells) {
  SampleEntry e;
  e.over = geometry::decompose_dominated(frontier.points, Vector(), max_cells);
  e.flipped = geometry::decompose_dominating(frontier.points, max_cells);
  e.frontier = std::move(frontier);
  e.path = std::move(path);
  return e;
}

SampleSet prepare_samples(const gp::IndependentGps& gps, const Box& domain, const SampleConfig& cfg,
                          SampleTimings* timings) {
  require(cfg.num_samples >= 1, "prepare_samples: need at least one sample");
  using Clock = std::chrono::steady_clock;
  auto seconds_since = [](Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };
  SampleTimings local;
  SampleSet set;
  set.entries.reserve(static_cast<std::size_t>(cfg.num_samples));
  for (int k = 0; k < cfg.num_samples; ++k) {
    const auto uk = static_cast<std::uint64_t>(k);
    auto t0 = Clock::now();
    sampler::SampledPath path = sampler::draw_path(gps, cfg.num_features, derive_seed(cfg.seed, 2 * uk));
    local.paths += seconds_since(t0);

    t0 = Clock::now();
    nsga2::Config solver = cfg.nsga2;
    solver.seed = derive_seed(cfg.seed, 2 * uk + 1);
    const nsga2::BatchObjective objective = [&path](const Matrix& x) { return path.evaluate_batch(x); };
    ParetoSet frontier = nsga2::solve(objective, domain, solver);
    local.solver += seconds_since(t0);

    t0 = Clock::now();
    set.entries.push_back(make_entry(std::move(frontier), std::move(path), cfg.max_cells));
    local.decomposition += seconds_since(t0);
  }
  if (timings != nullptr) *timings = local;
  return set;
}

std::vector<Term> evaluate_terms(const Vector& x, const SampleSet& samples, const gp::IndependentGps& gps) {
  const gp::Prediction pred = gps.predict(x);
  const Vector sd = pred.stddev();
  std::vector<Term> terms;
  terms.reserve(samples.entries.size());
  for (const auto& e : samples.entries) terms.push_back(make_term(e, e.path.evaluate(x), pred.mean, sd));
  return terms;
}

double zeta(double lambda, double z_over, double z_under) { return lambda / z_under + (1.0 - lambda) / z_over; }

double eta(double lambda, double z_under) { return lambda / z_under; }

double lb_naive_mc(std::span<const Term> terms, double lambda) {
  check_lambda(lambda);
  require(!terms.empty(), "lb_naive_mc: no samples");
  double sum = 0.0;
  for (const auto& t : terms) {
    double ratio = 0.0;
    if (t.in_over) {
      ratio = zeta(lambda, t.z_over, t.z_under);
    } else if (t.in_under) {
      ratio = eta(lambda, t.z_under);
    }
    sum += std::log(std::max(ratio, kLogFloor));
  }
  return sum / static_cast<double>(terms.size());
}

double theta_map(double p_hat, bool indicator, double r) {
  return (r * p_hat + (indicator ? 1.0 : 0.0)) / (r + 1.0);
}

double lb_map(std::span<const Term> terms, double lambda, double r) {
  check_lambda(lambda);
  require(r >= 0.0, "lb_map: r must be non-negative");
  require(!terms.empty(), "lb_map: no samples");
  if (r == 0.0) return lb_naive_mc(terms, lambda);
  double sum = 0.0;
  for (const auto& t : terms) {
    const double theta = theta_map(t.z_over / t.z_under, t.in_over, r);
    sum += theta * std::log(zeta(lambda, t.z_over, t.z_under)) + (1.0 - theta) * std::log(eta(lambda, t.z_under));
  }
  return sum / static_cast<double>(terms.size());
}

double pi_lower_bound(std::span<const Term> terms) {
  require(!terms.empty(), "pi_lower_bound: no samples");
  double sum = 0.0;
  for (const auto& t : terms) sum += 1.0 - t.z_under;
  return sum / static_cast<double>(terms.size());
}

std::vector<double> LambdaPolicy::default_grid() {
  return {1e-3, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
}

LambdaChoice optimize_lambda(std::span<const Term> terms, const LambdaPolicy& policy, Estimator estimator,
                             double r) {
  return optimize_lambda([&](double lambda) { return estimate(terms, lambda, estimator, r); }, policy);
}

LambdaChoice optimize_lambda(const std::function<double(double)>& bound, const LambdaPolicy& policy) {
  require(!policy.grid.empty(), "optimize_lambda: empty grid");
  std::size_t best = 0;
  std::vector<double> values(policy.grid.size());
  for (std::size_t i = 0; i < policy.grid.size(); ++i) {
    values[i] = bound(policy.grid[i]);
    if (values[i] > values[best]) best = i;
  }
  LambdaChoice choice{policy.grid[best], values[best]};
  if (!policy.refine || policy.grid.size() < 2) return choice;

  double a = policy.grid[best == 0 ? 0 : best - 1];
  double b = policy.grid[best + 1 < policy.grid.size() ? best + 1 : best];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = bound(c);
  double fd = bound(d);
  for (int it = 0; it < policy.refine_iterations; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = bound(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = bound(d);
    }
  }
  if (fc > choice.value) choice = {c, fc};
  if (fd > choice.value) choice = {d, fd};
  return choice;
}

double lb_naive_mc(const Vector& x, double lambda, const SampleSet& samples, const gp::IndependentGps& gps) {
  return lb_naive_mc(evaluate_terms(x, samples, gps), lambda);
}

double lb_map(const Vector& x, double lambda, const SampleSet& samples, const gp::IndependentGps& gps, double r) {
  return lb_map(evaluate_terms(x, samples, gps), lambda, r);
}

double pi_lower_bound(const Vector& x, const SampleSet& samples, const gp::IndependentGps& gps) {
  return pi_lower_bound(evaluate_terms(x, samples, gps));
}

LambdaChoice optimize_lambda(const Vector& x, const SampleSet& samples, const gp::IndependentGps& gps,
                             const LambdaPolicy& policy, Estimator estimator, double r) {
  return optimize_lambda(evaluate_terms(x, samples, gps), policy, estimator, r);
}

FantasySet::FantasySet(const gp::IndependentGps& base, const SampleSet& samples, Matrix pending)
    : pending_(std::move(pending)) {
  if (pending_.rows() == 0) return;
  conditioned_.reserve(samples.entries.size());
  for (const auto& e : samples.entries) {
    conditioned_.push_back(base.with_observations(pending_, e.path.evaluate_batch(pending_)));
  }
}

const gp::IndependentGps& FantasySet::posterior(int k, const gp::IndependentGps& base) const {
  if (conditioned_.empty()) return base;
  return conditioned_.at(static_cast<std::size_t>(k));
}

std::vector<Term> evaluate_terms(const Vector& x, const SampleSet& samples, const gp::IndependentGps& base,
                                 const FantasySet& fantasies) {
  if (fantasies.size() == 0) return evaluate_terms(x, samples, base);
  std::vector<Term> terms;
  terms.reserve(samples.entries.size());
  for (std::size_t k = 0; k < samples.entries.size(); ++k) {
    const auto& e = samples.entries[k];
    const gp::Prediction pred = fantasies.posterior(static_cast<int>(k), base).predict(x);
    terms.push_back(make_term(e, e.path.evaluate(x), pred.mean, pred.stddev()));
  }
  return terms;
}

LambdaChoice cmi_parallel(const Vector& x, const FantasySet& fantasies, const SampleSet& samples,
                          const gp::IndependentGps& base, const LambdaPolicy& policy, double r) {
  return optimize_lambda(evaluate_terms(x, samples, base, fantasies), policy, Estimator::kMap, r);
}

NoisyConditional noisy_conditional(const gp::Prediction& prediction, const Vector& y, double noise_var) {
  return noisy_conditional(prediction, y, Vector::Constant(prediction.mean.size(), noise_var));
}

NoisyConditional noisy_conditional(const gp::Prediction& prediction, const Vector& y, const Vector& noise_var) {
  require((noise_var.array() > 0.0).all(), "noisy_conditional: noise variance must be positive");
  require(y.size() == prediction.mean.size() && noise_var.size() == y.size(), "noisy_conditional: dimension mismatch");
  NoisyConditional c;
  const Eigen::ArrayXd s2 = prediction.variance.array();
  const Eigen::ArrayXd denom = s2 + noise_var.array();
  c.mean = (prediction.mean.array() + s2 / denom * (y - prediction.mean).array()).matrix();
  // s2 - s2^2 / (s2 + n) written without the cancellation.
  c.variance = (s2 * noise_var.array() / denom).matrix();
  return c;
}

NoisyProbabilities noisy_probabilities(const SampleEntry& entry, const NoisyConditional& conditional) {
  const Vector sd = conditional.variance.array().sqrt().matrix();
  NoisyProbabilities p;
  p.over = geometry::cell_probability(entry.over, conditional.mean, sd);
  p.dominating = geometry::dominating_probability(entry.flipped, conditional.mean, sd);
  p.between = std::max(0.0, 1.0 - p.over - p.dominating);
  return p;
}

std::vector<NoisyTerm> evaluate_noisy_terms(const Vector& x, const SampleSet& samples, const gp::IndependentGps& gps,
                                            const Vector& noise_var, int noise_draws, std::uint64_t seed) {
  require((noise_var.array() > 0.0).all(), "lb_noisy: noise variance must be positive");
  require(noise_draws >= 1, "lb_noisy: need at least one noise draw");
  const gp::Prediction pred = gps.predict(x);
  require(noise_var.size() == pred.mean.size(), "lb_noisy: noise dimension mismatch");
  const Vector sd = pred.stddev();
  const Vector noise_sd = noise_var.array().sqrt().matrix();
  std::vector<NoisyTerm> terms;
  terms.reserve(samples.entries.size() * static_cast<std::size_t>(noise_draws));
  for (std::size_t k = 0; k < samples.entries.size(); ++k) {
    const auto& e = samples.entries[k];
    const auto q = geometry::truncation_quantities(e.over, e.flipped, pred.mean, sd);
    const Vector fx = e.path.evaluate(x);
    std::mt19937_64 rng(derive_seed(seed, k));
    std::normal_distribution<double> normal;
    for (int j = 0; j < noise_draws; ++j) {
      Vector y = fx;
      for (Eigen::Index l = 0; l < y.size(); ++l) y[l] += noise_sd[l] * normal(rng);
      terms.push_back({q.z_over, q.z_under, noisy_probabilities(e, noisy_conditional(pred, y, noise_var))});
    }
  }
  return terms;
}

double lb_noisy(std::span<const NoisyTerm> terms, double lambda) {
  check_lambda(lambda);
  require(!terms.empty(), "lb_noisy: no samples");
  double sum = 0.0;
  for (const auto& t : terms) {
    const double mix = zeta(lambda, t.z_over, t.z_under) * t.probabilities.over +
                       eta(lambda, t.z_under) * t.probabilities.between;
    sum += std::log(std::max(mix, kLogFloor));
  }
  return sum / static_cast<double>(terms.size());
}

double lb_noisy(const Vector& x, double lambda, const SampleSet& samples, const gp::IndependentGps& gps,
                double noise_var, int noise_draws, std::uint64_t seed) {
  check_lambda(lambda);
  require(samples.size() >= 1, "lb_noisy: no samples");
  require(noise_var > 0.0, "lb_noisy: noise variance must be positive");
  const Vector noise = Vector::Constant(gps.num_objectives(), noise_var);
  return lb_noisy(evaluate_noisy_terms(x, samples, gps, noise, noise_draws, seed), lambda);
}

double expected_improvement(double mean, double stddev, double best) {
  const double gain = mean - best;
  if (!(stddev > 0.0)) return std::max(gain, 0.0);
  const double z = gain / stddev;
  return gain * normal_cdf(z) + stddev * normal_pdf(z);
}

double tchebycheff(const Vector& f, const Vector& weights, double rho) {
  require(f.size() == weights.size(), "tchebycheff: dimension mismatch");
  const Vector wf = weights.cwiseProduct(f);
  return wf.minCoeff() + rho * wf.sum();
}

Vector dirichlet_weights(int dim, std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  Vector w(dim);
  for (int i = 0; i < dim; ++i) w[i] = gamma(rng);
  return w / w.sum();
}

double ParegoModel::acquisition(const Vector& x) const {
  const gp::Moments m = gp.predict(x);
  return expected_improvement(m.mean, std::sqrt(m.variance), best);
}

ParegoModel make_parego_model(const gp::Dataset& data, const Box& domain, const Vector& weights, double rho,
                              const gp::FitOptions& options) {
  require(data.size() >= 1, "parego: empty dataset");
  require(weights.size() == data.output_dim(), "parego: weight dimension mismatch");
  const Vector lo = data.outputs.colwise().minCoeff().transpose();
  const Vector hi = data.outputs.colwise().maxCoeff().transpose();
  Vector range = hi - lo;
  for (Eigen::Index l = 0; l < range.size(); ++l) {
    if (!(range[l] > 0.0)) range[l] = 1.0;
  }
  // Shifted to [-1, 0] so that the best observed value of each objective is 0.
  Vector s(data.size());
  for (int i = 0; i < data.size(); ++i) {
    const Vector y = (data.outputs.row(i).transpose() - hi).cwiseQuotient(range);
    s[i] = tchebycheff(y, weights, rho);
  }
  const double mean = s.mean();
  const double var = data.size() > 1 ? (s.array() - mean).square().sum() / (data.size() - 1) : 0.0;
  const double scale = var > 0.0 ? std::sqrt(var) : 1.0;
  const Vector standardized = ((s.array() - mean) / scale).matrix();

  const gp::Dataset scalar(data.inputs, Matrix(standardized));
  gp::IndependentGps fitted = gp::fit(scalar, domain, options);
  ParegoModel model;
  model.gp = fitted.objective(0);
  model.weights = weights;
  model.rho = rho;
  model.best = standardized.maxCoeff();
  return model;
}

}  // namespace pfev::acquisition
