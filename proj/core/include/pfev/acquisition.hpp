#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "pfev/common.hpp"
#include "pfev/geometry.hpp"
#include "pfev/gp.hpp"
#include "pfev/nsga2.hpp"
#include "pfev/pareto.hpp"
#include "pfev/sampler.hpp"

namespace pfev::acquisition {

/// One sampled pair (frontier, path) with both decompositions of its frontier.
struct SampleEntry {
  ParetoSet frontier;
  sampler::SampledPath path;
  geometry::CellDecomposition over;
  geometry::CellDecomposition flipped;
};

struct SampleSet {
  std::vector<SampleEntry> entries;
  int size() const { return static_cast<int>(entries.size()); }
};

struct SampleConfig {
  int num_samples = 10;
  int num_features = 500;
  nsga2::Config nsga2{50, 1000};
  std::size_t max_cells = geometry::kDefaultMaxCells;
  std::uint64_t seed = 0;
};

/// Builds an entry from a frontier and the path it was computed on.
SampleEntry make_entry(ParetoSet frontier, sampler::SampledPath path,
                       std::size_t max_cells = geometry::kDefaultMaxCells);

/// Seconds spent in each stage of prepare_samples.
struct SampleTimings {
  double paths = 0.0;
  double solver = 0.0;
  double decomposition = 0.0;
};

/// Draws K paths, solves each with NSGA-II and decomposes the frontiers.
SampleSet prepare_samples(const gp::IndependentGps& gps, const Box& domain, const SampleConfig& cfg,
                          SampleTimings* timings = nullptr);

/// Per-sample quantities at a candidate x.
struct Term {
  double z_over = 0.0;
  double z_under = 0.0;
  bool in_over = false;   // sampled f(x) in A_O
  bool in_under = false;  // sampled f(x) in A_U
};

/// Terms for every entry, using the shared posterior `gps` at x.
std::vector<Term> evaluate_terms(const Vector& x, const SampleSet& samples, const gp::IndependentGps& gps);

/// Mixture coefficients zeta = lambda / Z_U + (1 - lambda) / Z_O and eta = lambda / Z_U.
double zeta(double lambda, double z_over, double z_under);
double eta(double lambda, double z_under);

/// Floor applied to the mixture ratio before taking logs.
inline constexpr double kLogFloor = 1e-300;

/// Naive Monte-Carlo estimate; samples outside A_U contribute log(kLogFloor).
/// Throws std::invalid_argument unless lambda in (0, 1].
double lb_naive_mc(std::span<const Term> terms, double lambda);

/// (r p_hat + indicator) / (r + 1).
double theta_map(double p_hat, bool indicator, double r = 1.0);

/// Beta-prior MAP estimate. With r = 0 this is the naive estimate.
double lb_map(std::span<const Term> terms, double lambda, double r = 1.0);

/// Mean of 1 - Z_U.
double pi_lower_bound(std::span<const Term> terms);

enum class Estimator { kNaiveMc, kMap };

struct LambdaPolicy {
  std::vector<double> grid = default_grid();
  bool refine = false;
  int refine_iterations = 30;

  static std::vector<double> default_grid();
};

struct LambdaChoice {
  double lambda = 1.0;
  double value = 0.0;
};

/// Best lambda over the grid, optionally refined by golden section within the
/// bracket around the best grid point.
LambdaChoice optimize_lambda(std::span<const Term> terms, const LambdaPolicy& policy, Estimator estimator,
                             double r = 1.0);
/// Same search for an arbitrary bound as a function of lambda.
LambdaChoice optimize_lambda(const std::function<double(double)>& bound, const LambdaPolicy& policy);

// Candidate-level wrappers.
double lb_naive_mc(const Vector& x, double lambda, const SampleSet& samples, const gp::IndependentGps& gps);
double lb_map(const Vector& x, double lambda, const SampleSet& samples, const gp::IndependentGps& gps,
              double r = 1.0);
double pi_lower_bound(const Vector& x, const SampleSet& samples, const gp::IndependentGps& gps);
LambdaChoice optimize_lambda(const Vector& x, const SampleSet& samples, const gp::IndependentGps& gps,
                             const LambdaPolicy& policy, Estimator estimator, double r = 1.0);

/// Pending batch points with per-entry posteriors conditioned on the values
/// each entry's own path takes at those points.
class FantasySet {
 public:
  FantasySet() = default;
  FantasySet(const gp::IndependentGps& base, const SampleSet& samples, Matrix pending);

  int size() const { return static_cast<int>(pending_.rows()); }
  const Matrix& pending() const { return pending_; }
  /// Posterior for entry k; the base posterior when nothing is pending.
  const gp::IndependentGps& posterior(int k, const gp::IndependentGps& base) const;

 private:
  Matrix pending_;
  std::vector<gp::IndependentGps> conditioned_;
};

/// Terms with per-entry conditioned posteriors.
std::vector<Term> evaluate_terms(const Vector& x, const SampleSet& samples, const gp::IndependentGps& base,
                                 const FantasySet& fantasies);

/// Conditional lower bound for greedy batch selection. With no pending points
/// this is exactly optimize_lambda(..., Estimator::kMap).
LambdaChoice cmi_parallel(const Vector& x, const FantasySet& fantasies, const SampleSet& samples,
                          const gp::IndependentGps& base, const LambdaPolicy& policy, double r = 1.0);

/// Posterior of f given a noisy observation y = f + eps, eps ~ N(0, noise_var).
struct NoisyConditional {
  Vector mean;      // nu
  Vector variance;  // s
};
NoisyConditional noisy_conditional(const gp::Prediction& prediction, const Vector& y, double noise_var);
/// Per-objective noise variances.
NoisyConditional noisy_conditional(const gp::Prediction& prediction, const Vector& y, const Vector& noise_var);

struct NoisyProbabilities {
  double over = 0.0;        // P(f in A_O | y)
  double between = 0.0;     // P(f in A_U \ A_O | y)
  double dominating = 0.0;  // P(f not in A_U | y)
};
NoisyProbabilities noisy_probabilities(const SampleEntry& entry, const NoisyConditional& conditional);

/// Per (entry, noise draw) quantities of the noisy bound.
struct NoisyTerm {
  double z_over = 0.0;
  double z_under = 0.0;
  NoisyProbabilities probabilities;
};
std::vector<NoisyTerm> evaluate_noisy_terms(const Vector& x, const SampleSet& samples, const gp::IndependentGps& gps,
                                            const Vector& noise_var, int noise_draws = 4, std::uint64_t seed = 0);
double lb_noisy(std::span<const NoisyTerm> terms, double lambda);

/// Noisy-observation lower bound averaged over the K entries and
/// `noise_draws` simulated observations per entry. Noise draws come from
/// `seed`, so the value is a deterministic function of its arguments.
double lb_noisy(const Vector& x, double lambda, const SampleSet& samples, const gp::IndependentGps& gps,
                double noise_var, int noise_draws = 4, std::uint64_t seed = 0);

/// Expected improvement of N(mean, stddev^2) over `best` (maximization).
double expected_improvement(double mean, double stddev, double best);

/// Augmented Tchebycheff scalarization min_l w_l f_l + rho sum_l w_l f_l.
double tchebycheff(const Vector& f, const Vector& weights, double rho = 0.05);

/// Uniform draw from the probability simplex.
Vector dirichlet_weights(int dim, std::mt19937_64& rng);

/// Single GP on the scalarized outputs, each objective first mapped to
/// [-1, 0] with 0 at its best observed value.
struct ParegoModel {
  gp::GpPosterior gp;
  Vector weights;
  double rho = 0.05;
  double best = 0.0;  // best standardized scalarized observation

  double acquisition(const Vector& x) const;
};

ParegoModel make_parego_model(const gp::Dataset& data, const Box& domain, const Vector& weights, double rho,
                              const gp::FitOptions& options = {});

}  // namespace pfev::acquisition
