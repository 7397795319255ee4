#include "pfev/harness.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "pfev/acquisition.hpp"
#include "pfev/direct.hpp"
#include "pfev/geometry.hpp"
#include "pfev/gp.hpp"

namespace pfev::harness {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Standardizer {
  Vector shift;
  Vector scale;
};

Standardizer standardizer(const Matrix& y, bool enabled) {
  Standardizer s{Vector::Zero(y.cols()), Vector::Ones(y.cols())};
  if (!enabled) return s;
  for (Eigen::Index l = 0; l < y.cols(); ++l) {
    const double mean = y.col(l).mean();
    const double var = y.rows() > 1 ? (y.col(l).array() - mean).square().sum() / static_cast<double>(y.rows() - 1) : 0.0;
    s.shift[l] = mean;
    if (var > 0.0) s.scale[l] = std::sqrt(var);
  }
  return s;
}

class Loop {
 public:
  Loop(const RunConfig& cfg, const problems::Problem& problem, const ParetoSet& reference, const Observer& observer)
      : cfg_(cfg),
        problem_(problem),
        reference_(reference),
        observer_(observer),
        domain_(problem.domain()),
        noise_rng_(derive_seed(cfg.seed, 2)),
        choice_rng_(derive_seed(cfg.seed, 3)) {
    direct_ = cfg.direct;
    if (direct_.max_evaluations == 0) direct_.max_evaluations = direct::Config::for_dimension(problem.d).max_evaluations;
    history_.problem_id = problem.id;
    history_.strategy = to_string(cfg.strategy);
    history_.seed = cfg.seed;
    history_.reference_point = rhv_reference_point(reference);
    history_.reference_hypervolume = geometry::hypervolume(reference.points, history_.reference_point);
    history_.reference_size = reference.size();
    require(history_.reference_hypervolume > 0.0, "run_bo: reference frontier has zero hypervolume");
  }

  RunHistory run() {
    initial_design();
    if (observer_) observer_(history_, nullptr);
    for (int t = 1; t <= cfg_.iterations; ++t) {
      history_.iterations.push_back(iterate(t));
      if (observer_) observer_(history_, &history_.iterations.back());
    }
    return history_;
  }

 private:
  Vector observe(const Vector& f) {
    if (!cfg_.noise.enabled) return f;
    std::normal_distribution<double> normal(0.0, cfg_.noise.stddev);
    Vector y = f;
    for (Eigen::Index l = 0; l < y.size(); ++l) y[l] += normal(noise_rng_);
    return y;
  }

  void append(const Vector& x, const Vector& f, const Vector& y) {
    const Eigen::Index n = x_.rows();
    x_.conservativeResize(n + 1, problem_.d);
    y_.conservativeResize(n + 1, problem_.L);
    f_.conservativeResize(n + 1, problem_.L);
    x_.row(n) = x.transpose();
    y_.row(n) = y.transpose();
    f_.row(n) = f.transpose();
  }

  double observed_hypervolume() const {
    return geometry::hypervolume(non_dominated_filter(f_).points, history_.reference_point);
  }

  void initial_design() {
    std::mt19937_64 rng(derive_seed(cfg_.seed, 1));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    x_.resize(0, problem_.d);
    y_.resize(0, problem_.L);
    f_.resize(0, problem_.L);
    for (int i = 0; i < cfg_.initial_points; ++i) {
      Vector x(problem_.d);
      for (int k = 0; k < problem_.d; ++k) x[k] = uniform(rng);
      const Vector f = problem_.evaluate(x);
      append(x, f, observe(f));
    }
    history_.initial_x = x_;
    history_.initial_y = y_;
    history_.initial_f = f_;
    history_.initial_hypervolume = observed_hypervolume();
    history_.initial_rhv = history_.initial_hypervolume / history_.reference_hypervolume;
  }

  Vector noise_variances(const Standardizer& s) const {
    Vector v(problem_.L);
    for (int l = 0; l < problem_.L; ++l) {
      v[l] = cfg_.noise.enabled ? cfg_.noise.stddev * cfg_.noise.stddev / (s.scale[l] * s.scale[l])
                                : cfg_.fit.noise_variance;
    }
    return v;
  }

  gp::IndependentGps fit_models(const Standardizer& s, const Vector& noise) const {
    std::vector<gp::GpPosterior> models;
    for (int l = 0; l < problem_.L; ++l) {
      gp::FitOptions options = cfg_.fit;
      options.noise_variance = noise[l];
      const Vector target = ((y_.col(l).array() - s.shift[l]) / s.scale[l]).matrix();
      const gp::Dataset data(x_, Matrix(target));
      models.push_back(gp::fit(data, domain_, options).objective(0));
    }
    return gp::IndependentGps(std::move(models));
  }

  double fixed_lambda() const {
    if (cfg_.strategy == Strategy::kPfevLambda1) return 1.0;
    if (cfg_.strategy == Strategy::kPfevLambdaMin) return 1e-3;
    return kNaN;
  }

  // Bound value and lambda for a candidate, given per-entry terms.
  acquisition::LambdaChoice score(std::span<const acquisition::Term> terms) const {
    using acquisition::Estimator;
    switch (cfg_.strategy) {
      case Strategy::kPfevMap: return acquisition::optimize_lambda(terms, cfg_.lambda, Estimator::kMap, cfg_.map_r);
      case Strategy::kPfevMc: return acquisition::optimize_lambda(terms, cfg_.lambda, Estimator::kNaiveMc);
      default: {
        const double lambda = fixed_lambda();
        return {lambda, acquisition::lb_map(terms, lambda, cfg_.map_r)};
      }
    }
  }

  acquisition::LambdaChoice score_noisy(std::span<const acquisition::NoisyTerm> terms) const {
    if (cfg_.strategy == Strategy::kPfevMap || cfg_.strategy == Strategy::kPfevMc) {
      return acquisition::optimize_lambda([&](double l) { return acquisition::lb_noisy(terms, l); }, cfg_.lambda);
    }
    const double lambda = fixed_lambda();
    return {lambda, acquisition::lb_noisy(terms, lambda)};
  }

  IterationRecord iterate(int t) {
    const auto t_start = Clock::now();
    IterationRecord rec;
    rec.iteration = t;
    const int q_total = cfg_.batch_size;
    rec.x.resize(q_total, problem_.d);

    if (cfg_.strategy == Strategy::kRandom) {
      auto t0 = Clock::now();
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      for (int q = 0; q < q_total; ++q) {
        for (int k = 0; k < problem_.d; ++k) rec.x(q, k) = uniform(choice_rng_);
        rec.lambda.push_back(kNaN);
        rec.acquisition.push_back(kNaN);
      }
      rec.timings.acquisition = seconds_since(t0);
    } else if (cfg_.strategy == Strategy::kParego) {
      for (int q = 0; q < q_total; ++q) {
        auto t0 = Clock::now();
        const Vector w = acquisition::dirichlet_weights(problem_.L, choice_rng_);
        const acquisition::ParegoModel model =
            acquisition::make_parego_model(gp::Dataset(x_, y_), domain_, w, cfg_.parego_rho, cfg_.fit);
        rec.timings.fit += seconds_since(t0);
        t0 = Clock::now();
        const auto best = direct::maximize([&](const Vector& x) { return model.acquisition(x); }, domain_, direct_);
        rec.x.row(q) = best.x.transpose();
        rec.lambda.push_back(kNaN);
        rec.acquisition.push_back(best.value);
        rec.timings.acquisition += seconds_since(t0);
      }
    } else {
      pfev_select(t, rec);
    }

    const auto t_eval = Clock::now();
    rec.y.resize(q_total, problem_.L);
    rec.f.resize(q_total, problem_.L);
    for (int q = 0; q < q_total; ++q) {
      const Vector x = rec.x.row(q).transpose();
      const Vector f = problem_.evaluate(x);
      const Vector y = observe(f);
      rec.f.row(q) = f.transpose();
      rec.y.row(q) = y.transpose();
      append(x, f, y);
    }
    rec.hypervolume = observed_hypervolume();
    rec.rhv = rec.hypervolume / history_.reference_hypervolume;
    rec.timings.evaluation = seconds_since(t_eval);
    rec.timings.total = seconds_since(t_start);
    return rec;
  }

  void pfev_select(int t, IterationRecord& rec) {
    auto t0 = Clock::now();
    const Standardizer s = standardizer(y_, cfg_.normalize_outputs);
    const Vector noise = noise_variances(s);
    const gp::IndependentGps gps = fit_models(s, noise);
    rec.timings.fit = seconds_since(t0);

    acquisition::SampleConfig sc;
    sc.num_samples = cfg_.num_samples;
    sc.num_features = cfg_.num_features;
    sc.nsga2 = cfg_.nsga2;
    sc.seed = derive_seed(cfg_.seed, 1000 + static_cast<std::uint64_t>(t));
    acquisition::SampleTimings st;
    const acquisition::SampleSet samples = acquisition::prepare_samples(gps, domain_, sc, &st);
    rec.timings.paths = st.paths;
    rec.timings.solver = st.solver;
    rec.timings.decomposition = st.decomposition;

    t0 = Clock::now();
    const std::uint64_t noise_seed = derive_seed(cfg_.seed, 5000 + static_cast<std::uint64_t>(t));
    Matrix pending(0, problem_.d);
    for (int q = 0; q < cfg_.batch_size; ++q) {
      const bool conditional = q > 0 || cfg_.force_cmi;
      acquisition::FantasySet fantasies;
      if (conditional) fantasies = acquisition::FantasySet(gps, samples, pending);

      auto choose = [&](const Vector& x) -> acquisition::LambdaChoice {
        if (cfg_.noise.enabled) {
          return score_noisy(acquisition::evaluate_noisy_terms(x, samples, gps, noise, cfg_.noise.draws, noise_seed));
        }
        if (conditional) return score(acquisition::evaluate_terms(x, samples, gps, fantasies));
        return score(acquisition::evaluate_terms(x, samples, gps));
      };
      const auto best = direct::maximize([&](const Vector& x) { return choose(x).value; }, domain_, direct_);
      const acquisition::LambdaChoice at_best = choose(best.x);
      rec.x.row(q) = best.x.transpose();
      rec.lambda.push_back(at_best.lambda);
      rec.acquisition.push_back(best.value);
      pending.conservativeResize(q + 1, problem_.d);
      pending.row(q) = best.x.transpose();
    }
    rec.timings.acquisition = seconds_since(t0);
  }

  const RunConfig& cfg_;
  const problems::Problem& problem_;
  const ParetoSet& reference_;
  const Observer& observer_;
  Box domain_;
  direct::Config direct_;
  std::mt19937_64 noise_rng_;
  std::mt19937_64 choice_rng_;
  Matrix x_;
  Matrix y_;
  Matrix f_;
  RunHistory history_;
};

}  // namespace

int RunHistory::num_observations() const {
  int n = static_cast<int>(initial_x.rows());
  for (const auto& r : iterations) n += static_cast<int>(r.x.rows());
  return n;
}

Vector rhv_reference_point(const ParetoSet& reference) {
  require(!reference.empty(), "rhv: empty reference frontier");
  return (reference.points.colwise().minCoeff().array() - 1e-6).matrix().transpose();
}

double rhv(const Matrix& observed, const ParetoSet& reference) {
  const Vector ref = rhv_reference_point(reference);
  const double denom = geometry::hypervolume(reference.points, ref);
  require(denom > 0.0, "rhv: reference frontier has zero hypervolume");
  if (observed.rows() == 0) return 0.0;
  return geometry::hypervolume(non_dominated_filter(observed).points, ref) / denom;
}

RunHistory run_bo(const RunConfig& cfg, const problems::Problem& problem, const ParetoSet& reference,
                  const Observer& observer) {
  cfg.validate();
  Loop loop(cfg, problem, reference, observer);
  return loop.run();
}

RunHistory run_bo(const RunConfig& cfg, const Observer& observer) {
  const problems::Problem problem = make_problem(cfg.problem, cfg.seed);
  const ParetoSet reference = reference::build(problem, cfg.reference);
  return run_bo(cfg, problem, reference, observer);
}

}  // namespace pfev::harness
