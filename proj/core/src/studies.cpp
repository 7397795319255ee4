#include "pfev/studies.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "pfev/acquisition.hpp"
#include "pfev/geometry.hpp"
#include "pfev/gp.hpp"
#include "pfev/normal.hpp"
#include "pfev/pareto.hpp"

namespace pfev::studies {

Matrix simplex_points(int L, int n, std::uint64_t seed) {
  require(L >= 2 && n >= 1, "simplex_points: need L >= 2 and n >= 1");
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  Matrix p(n, L);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < L; ++l) p(i, l) = gamma(rng);
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

GapRow gap_instance(int L, int size, std::uint64_t seed) {
  const Matrix frontier = non_dominated_filter(simplex_points(L, size, derive_seed(seed, static_cast<std::uint64_t>(size)))).points;
  GapRow row;
  row.L = L;
  row.size = size;
  row.seed = seed;
  row.true_volume = 1.0 / std::tgamma(L + 1.0);
  row.over_volume = geometry::hypervolume(frontier, Vector::Zero(L));
  // Inside the unit cube, the region dominating the frontier is the region
  // dominated by the negated frontier above -1.
  row.under_volume = 1.0 - geometry::hypervolume(Matrix(-frontier), Vector::Constant(L, -1.0));
  row.over_ratio = row.over_volume / row.true_volume;
  row.under_ratio = row.under_volume / row.true_volume;
  return row;
}

std::vector<GapRow> gap_study(int L, const std::vector<int>& sizes, const std::vector<std::uint64_t>& seeds) {
  require(L >= 2, "gap_study: L must be >= 2");
  std::vector<GapRow> rows;
  for (int n : sizes) {
    for (auto s : seeds) rows.push_back(gap_instance(L, n, s));
  }
  return rows;
}

namespace {

constexpr int kObjectives = 2;
constexpr int kChunk = 500;

// Exact joint posterior draws of both objectives on a fixed input grid.
struct GridPosterior {
  Matrix grid;  // G x 1
  std::vector<Vector> mean;
  std::vector<Matrix> factor;  // G x r square root of each posterior covariance
};

GridPosterior grid_posterior(const gp::IndependentGps& gps, const Matrix& grid) {
  GridPosterior post;
  post.grid = grid;
  const Eigen::Index g = grid.rows();
  for (int l = 0; l < gps.num_objectives(); ++l) {
    const auto& m = gps.objective(l);
    const Matrix kxg = gp::kernel_matrix(m.params(), m.inputs(), grid);
    const Matrix v = m.factor().triangularView<Eigen::Lower>().solve(kxg);
    post.mean.push_back(kxg.transpose() * m.alpha());
    Matrix cov = gp::kernel_matrix(m.params(), grid, grid) - v.transpose() * v;
    cov = 0.5 * (cov + cov.transpose());
    // Smooth kernel: the covariance is numerically low rank, so draw through
    // the leading eigenvectors only.
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    if (eig.info() != Eigen::Success) throw NumericalError("estimator study: eigendecomposition failed");
    const Vector& lam = eig.eigenvalues();
    const double cutoff = 1e-14 * std::max(lam.maxCoeff(), 1e-300);
    Eigen::Index rank = 0;
    while (rank < g && lam[g - 1 - rank] > cutoff) ++rank;
    Matrix root(g, std::max<Eigen::Index>(rank, 1));
    root.setZero();
    for (Eigen::Index k = 0; k < rank; ++k) root.col(k) = eig.eigenvectors().col(g - 1 - k) * std::sqrt(lam[g - 1 - k]);
    post.factor.push_back(std::move(root));
  }
  return post;
}

// Non-dominated rows of a two-column matrix with index >= first, in
// descending order of the first column, thinned to an evenly spaced subset
// (extremes kept) of at most max_points.
std::vector<int> capped_frontier(const Matrix& values, int first, int max_points, std::vector<int>& order) {
  const int n = static_cast<int>(values.rows());
  order.resize(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const double* f1 = values.col(0).data();
  const double* f2 = values.col(1).data();
  std::sort(order.begin(), order.end(), [&](int p, int q) {
    if (f1[p] != f1[q]) return f1[p] > f1[q];
    if (f2[p] != f2[q]) return f2[p] > f2[q];
    return p < q;
  });
  std::vector<int> nd;
  double best = -kInf;
  for (int idx : order) {
    if (f2[idx] > best) {
      best = f2[idx];
      if (idx >= first) nd.push_back(idx);
    }
  }
  const int m = static_cast<int>(nd.size());
  if (m <= max_points) return nd;
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(max_points));
  for (int i = 0; i < max_points; ++i) {
    const auto pos = static_cast<std::size_t>(std::llround(static_cast<double>(i) * (m - 1) / (max_points - 1)));
    out.push_back(nd[pos]);
  }
  return out;
}

// Predictive moments of the candidates, one array per quantity.
struct Candidates {
  std::vector<double> mean0, mean1, inv_sd0, inv_sd1;
  int size() const { return static_cast<int>(mean0.size()); }
};

// Slab kernels of the staircase. Tails hold the smaller tail mass, so a
// breakpoint above the mean has cdf 1 - t and survival t.

// acc += P(a_lo < f1 <= a_hi) P(f2 <= b)
void over_slab(std::size_t n, double a_hi, double a_lo, double b, const double* __restrict t_hi,
               const double* __restrict t_lo, const double* __restrict t_b, const double* __restrict mu0,
               const double* __restrict mu1, double* __restrict acc) {
  for (std::size_t j = 0; j < n; ++j) {
    const double th = t_hi[j], tl = t_lo[j], tb = t_b[j], m0 = mu0[j], m1 = mu1[j];
    const double cdf_hi = a_hi > m0 ? 1.0 - th : th;
    const double width = a_lo > m0 ? tl - th : cdf_hi - tl;
    acc[j] += (width > 0.0 ? width : 0.0) * (b > m1 ? 1.0 - tb : tb);
  }
}

// acc += P(b_lo < f2 <= b_hi) P(f1 > a)
void dominating_slab(std::size_t n, double b_lo, double b_hi, double a, const double* __restrict t_lo,
                     const double* __restrict t_hi, const double* __restrict t_a, const double* __restrict mu1,
                     const double* __restrict mu0, double* __restrict acc) {
  for (std::size_t j = 0; j < n; ++j) {
    const double th = t_hi[j], tl = t_lo[j], ta = t_a[j], m0 = mu0[j], m1 = mu1[j];
    const double cdf_hi = b_hi > m1 ? 1.0 - th : th;
    const double width = b_lo > m1 ? tl - th : cdf_hi - tl;
    acc[j] += (width > 0.0 ? width : 0.0) * (a > m0 ? ta : 1.0 - ta);
  }
}

// Unbounded end slab: P(f1 <= a) P(f2 <= b), or P(f1 > a) P(f2 > b) when `survival`.
void last_slab(std::size_t n, double a, double b, const double* __restrict t_a, const double* __restrict t_b,
               const double* __restrict mu0, const double* __restrict mu1, bool survival, double* __restrict acc) {
  for (std::size_t j = 0; j < n; ++j) {
    const double ta = t_a[j], tb = t_b[j];
    const bool a_up = a > mu0[j], b_up = b > mu1[j];
    const double pa = (a_up != survival) ? 1.0 - ta : ta;
    const double pb = (b_up != survival) ? 1.0 - tb : tb;
    acc[j] += pa * pb;
  }
}

// Terms of every candidate against one two-objective frontier sorted by the
// first objective descending (so the second ascends). Same quantities as the
// general decompositions, with one tail evaluation per coordinate and the
// candidate loop innermost so that it vectorizes.
class Staircase {
 public:
  void terms(const std::vector<double>& a, const std::vector<double>& b, const Candidates& cand, const double* f1,
             const double* f2, acquisition::Term* out) {
    const std::size_t m = a.size();
    const std::size_t n = static_cast<std::size_t>(cand.size());
    ta_.resize(m * n);
    tb_.resize(m * n);
    over_.assign(n, 0.0);
    dominating_.assign(n, 0.0);
    in_over_.assign(n, 0);
    beyond_.assign(n, 0);
    const double* __restrict mu0 = cand.mean0.data();
    const double* __restrict mu1 = cand.mean1.data();
    const double* __restrict is0 = cand.inv_sd0.data();
    const double* __restrict is1 = cand.inv_sd1.data();
    for (std::size_t i = 0; i < m; ++i) {
      double* __restrict ua = ta_.data() + i * n;
      double* __restrict ub = tb_.data() + i * n;
      const double ai = a[i], bi = b[i];
      for (std::size_t j = 0; j < n; ++j) {
        ua[j] = std::fabs((ai - mu0[j]) * is0[j]);
        ub[j] = std::fabs((bi - mu1[j]) * is1[j]);
      }
    }
    normal_tail_inplace(ta_.data(), static_cast<long>(m * n));
    normal_tail_inplace(tb_.data(), static_cast<long>(m * n));

    for (std::size_t i = 0; i < m; ++i) {
      const double* t_hi = ta_.data() + i * n;
      const double* t_b = tb_.data() + i * n;
      if (i + 1 < m) {
        over_slab(n, a[i], a[i + 1], b[i], t_hi, ta_.data() + (i + 1) * n, t_b, mu0, mu1, over_.data());
      } else {
        last_slab(n, a[i], b[i], t_hi, t_b, mu0, mu1, false, over_.data());
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double* t_lo = tb_.data() + i * n;
      const double* t_a = ta_.data() + i * n;
      if (i + 1 < m) {
        // Same slab shape with the objectives swapped and the other tail.
        dominating_slab(n, b[i], b[i + 1], a[i], t_lo, tb_.data() + (i + 1) * n, t_a, mu1, mu0, dominating_.data());
      } else {
        last_slab(n, a[i], b[i], t_a, t_lo, mu0, mu1, true, dominating_.data());
      }
    }
    unsigned char* __restrict in_over = in_over_.data();
    unsigned char* __restrict beyond = beyond_.data();
    for (std::size_t i = 0; i < m; ++i) {
      const double ai = a[i], bi = b[i];
      for (std::size_t j = 0; j < n; ++j) {
        const bool le1 = f1[j] <= ai, le2 = f2[j] <= bi;
        const bool ge1 = f1[j] >= ai, ge2 = f2[j] >= bi;
        in_over[j] |= static_cast<unsigned char>(le1 & le2);
        beyond[j] |= static_cast<unsigned char>(ge1 & ge2 & !(le1 & le2));
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      auto& t = out[j];
      t.z_under = std::clamp(1.0 - std::clamp(dominating_[j], 0.0, 1.0), geometry::kProbabilityFloor,
                             geometry::kProbabilityCeiling);
      t.z_over = std::clamp(std::clamp(over_[j], 0.0, 1.0), geometry::kProbabilityFloor, t.z_under);
      t.in_over = in_over[j] != 0;
      t.in_under = beyond[j] == 0;
    }
  }

 private:
  std::vector<double> ta_, tb_, over_, dominating_;
  std::vector<unsigned char> in_over_, beyond_;
};

// Streams posterior draws; for each draw, `sink` receives the terms of all
// candidates.
class TermSampler {
 public:
  TermSampler(const GridPosterior& post, const gp::IndependentGps& gps, int num_candidates, int max_frontier)
      : post_(post), num_candidates_(num_candidates), max_frontier_(max_frontier) {
    for (int j = 0; j < num_candidates; ++j) {
      const gp::Prediction p = gps.predict(post.grid.row(j).transpose());
      cand_.mean0.push_back(p.mean[0]);
      cand_.mean1.push_back(p.mean[1]);
      cand_.inv_sd0.push_back(1.0 / std::sqrt(p.variance[0]));
      cand_.inv_sd1.push_back(1.0 / std::sqrt(p.variance[1]));
    }
  }

  template <class Sink>
  void draw(int count, std::mt19937_64& rng, Sink&& sink) const {
    const Eigen::Index g = post_.grid.rows();
    std::normal_distribution<double> normal;
    std::vector<Matrix> draws(kObjectives);
    Matrix values(g, kObjectives);
    std::vector<int> order;
    std::vector<double> a, b;
    std::vector<acquisition::Term> terms(static_cast<std::size_t>(num_candidates_));
    Staircase stairs;
    for (int done = 0; done < count; done += kChunk) {
      const int nb = std::min(kChunk, count - done);
      for (int l = 0; l < kObjectives; ++l) {
        const Matrix& root = post_.factor[static_cast<std::size_t>(l)];
        Matrix z(root.cols(), nb);
        for (Eigen::Index c = 0; c < nb; ++c) {
          for (Eigen::Index r = 0; r < z.rows(); ++r) z(r, c) = normal(rng);
        }
        draws[static_cast<std::size_t>(l)].noalias() = root * z;
        draws[static_cast<std::size_t>(l)].colwise() += post_.mean[static_cast<std::size_t>(l)];
      }
      for (int c = 0; c < nb; ++c) {
        for (int l = 0; l < kObjectives; ++l) values.col(l) = draws[static_cast<std::size_t>(l)].col(c);
        // Pareto-optimal solver points: a converged solver returns points on
        // the path's frontier, but not at the candidate inputs.
        const std::vector<int> keep = capped_frontier(values, num_candidates_, max_frontier_, order);
        a.clear();
        b.clear();
        for (int i : keep) {
          a.push_back(values(i, 0));
          b.push_back(values(i, 1));
        }
        stairs.terms(a, b, cand_, values.col(0).data(), values.col(1).data(), terms.data());
        sink(std::as_const(terms));
      }
    }
  }

  int num_candidates() const { return num_candidates_; }

 private:
  const GridPosterior& post_;
  int num_candidates_;
  int max_frontier_;
  Candidates cand_;
};

double best_over_grid(const std::vector<double>& values) { return *std::max_element(values.begin(), values.end()); }

}  // namespace

std::vector<EstimatorRow> estimator_study(const EstimatorStudyConfig& cfg) {
  require(cfg.num_seeds >= 1 && cfg.num_candidates >= 1 && cfg.training_points >= 1, "estimator_study: bad sizes");
  require(cfg.max_frontier >= 2, "estimator_study: max_frontier must be >= 2");
  const std::vector<double> lambdas = acquisition::LambdaPolicy::default_grid();
  const std::size_t nk = cfg.sample_sizes.size();
  // errors[estimator][k][seed]
  std::vector<std::vector<std::vector<double>>> errors(3, std::vector<std::vector<double>>(nk));

  Matrix grid(cfg.num_candidates + cfg.num_solver_points, 1);
  for (int j = 0; j < cfg.num_candidates; ++j) grid(j, 0) = (j + 0.5) / cfg.num_candidates;
  for (int i = 0; i < cfg.num_solver_points; ++i) {
    grid(cfg.num_candidates + i, 0) = cfg.num_solver_points > 1 ? static_cast<double>(i) / (cfg.num_solver_points - 1) : 0.5;
  }

  for (int s = 0; s < cfg.num_seeds; ++s) {
    const std::uint64_t seed = derive_seed(cfg.base_seed, static_cast<std::uint64_t>(s));
    std::mt19937_64 data_rng(derive_seed(seed, 0));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal;
    gp::KernelParams params{cfg.length_scale, 1.0, cfg.noise_variance};
    Matrix x(cfg.training_points, 1);
    for (int i = 0; i < cfg.training_points; ++i) x(i, 0) = uniform(data_rng);
    const Matrix kxx = gp::kernel_matrix(params, x, x) + cfg.noise_variance * Matrix::Identity(x.rows(), x.rows());
    const Matrix chol = Eigen::LLT<Matrix>(kxx).matrixL();
    std::vector<gp::GpPosterior> models;
    for (int l = 0; l < kObjectives; ++l) {
      Vector z(x.rows());
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(data_rng);
      models.emplace_back(params, x, Vector(chol * z));
    }
    const gp::IndependentGps gps(std::move(models));
    const GridPosterior post = grid_posterior(gps, grid);
    const TermSampler sampler(post, gps, cfg.num_candidates, cfg.max_frontier);

    // Large-sample naive estimate, accumulated draw by draw. Samples in
    // A_U \ A_O contribute log(lambda) - log(Z_U), so only their count and
    // the sum of log(Z_U) are needed.
    const std::size_t nc = static_cast<std::size_t>(cfg.num_candidates);
    std::vector<double> over_sum(nc * lambdas.size(), 0.0);
    std::vector<double> between_log_zu(nc, 0.0);
    std::vector<long> between_count(nc, 0), outside_count(nc, 0);
    std::mt19937_64 truth_rng(derive_seed(seed, 1));
    sampler.draw(cfg.ground_truth_samples, truth_rng, [&](const std::vector<acquisition::Term>& terms) {
      for (std::size_t j = 0; j < nc; ++j) {
        const auto& t = terms[j];
        if (t.in_over) {
          for (std::size_t li = 0; li < lambdas.size(); ++li) {
            over_sum[j * lambdas.size() + li] +=
                std::log(std::max(acquisition::zeta(lambdas[li], t.z_over, t.z_under), acquisition::kLogFloor));
          }
        } else if (t.in_under) {
          ++between_count[j];
          between_log_zu[j] += std::log(t.z_under);
        } else {
          ++outside_count[j];
        }
      }
    });
    std::vector<double> truth(nc);
    for (std::size_t j = 0; j < nc; ++j) {
      double best = -kInf;
      for (std::size_t li = 0; li < lambdas.size(); ++li) {
        const double total = over_sum[j * lambdas.size() + li] +
                             static_cast<double>(between_count[j]) * std::log(lambdas[li]) - between_log_zu[j] +
                             static_cast<double>(outside_count[j]) * std::log(acquisition::kLogFloor);
        best = std::max(best, total / cfg.ground_truth_samples);
      }
      truth[j] = best;
    }

    for (std::size_t ki = 0; ki < nk; ++ki) {
      const int K = cfg.sample_sizes[ki];
      std::mt19937_64 rng(derive_seed(seed, 100 + ki));
      std::vector<std::vector<acquisition::Term>> terms(nc);
      sampler.draw(K, rng, [&](const std::vector<acquisition::Term>& draw) {
        for (std::size_t j = 0; j < nc; ++j) terms[j].push_back(draw[j]);
      });
      const double r_sqrt = std::sqrt(10.0 / K);
      double se[3] = {0.0, 0.0, 0.0};
      for (int j = 0; j < cfg.num_candidates; ++j) {
        const auto& t = terms[static_cast<std::size_t>(j)];
        std::vector<double> naive, map1, maps;
        for (double lam : lambdas) {
          naive.push_back(acquisition::lb_naive_mc(t, lam));
          map1.push_back(acquisition::lb_map(t, lam, 1.0));
          maps.push_back(acquisition::lb_map(t, lam, r_sqrt));
        }
        const double tr = truth[static_cast<std::size_t>(j)];
        se[0] += std::pow(best_over_grid(naive) - tr, 2);
        se[1] += std::pow(best_over_grid(map1) - tr, 2);
        se[2] += std::pow(best_over_grid(maps) - tr, 2);
      }
      for (int e = 0; e < 3; ++e) errors[static_cast<std::size_t>(e)][ki].push_back(se[e] / cfg.num_candidates);
    }
  }

  const char* names[3] = {"naive", "map-r1", "map-rsqrt"};
  std::vector<EstimatorRow> rows;
  for (int e = 0; e < 3; ++e) {
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const auto& v = errors[static_cast<std::size_t>(e)][ki];
      EstimatorRow row;
      row.estimator = names[e];
      row.K = cfg.sample_sizes[ki];
      row.r = e == 0 ? 0.0 : (e == 1 ? 1.0 : std::sqrt(10.0 / row.K));
      row.seeds = static_cast<int>(v.size());
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      row.mse_mean = mean;
      row.mse_sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace pfev::studies
