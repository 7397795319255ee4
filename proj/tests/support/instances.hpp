#pragma once
// Random acquisition instances built directly from frontiers and Gaussian
// predictive moments, without GPs or solvers.

#include <random>
#include <vector>

#include "pfev/acquisition.hpp"
#include "pfev/geometry.hpp"
#include "pfev/pareto.hpp"

namespace instances {

using pfev::Matrix;
using pfev::Vector;

inline Matrix sphere_frontier(int L, int max_size, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  std::uniform_int_distribution<int> count(1, max_size);
  const int n = count(rng);
  Matrix pts(n, L);
  for (int i = 0; i < n; ++i) {
    Vector d(L);
    for (int l = 0; l < L; ++l) d[l] = std::abs(z(rng)) + 1e-3;
    pts.row(i) = (d / d.norm()).transpose();
  }
  return pfev::non_dominated_filter(pts).points;
}

// One term: a frontier, predictive moments, and a sampled value that does not
// strictly dominate the frontier (the frontier of the path it came from
// dominates every value of that path).
inline pfev::acquisition::Term random_term(int L, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  const Matrix F = sphere_frontier(L, 8, rng);
  Vector mean(L), sd(L), f(L);
  // Redraw the moments when they put almost no mass inside A_U.
  for (bool found = false; !found;) {
    for (int l = 0; l < L; ++l) {
      mean[l] = 0.6 + 0.4 * z(rng);
      sd[l] = 0.05 + 0.5 * std::abs(z(rng));
    }
    for (int attempt = 0; attempt < 200 && !found; ++attempt) {
      for (int l = 0; l < L; ++l) f[l] = mean[l] + sd[l] * z(rng);
      found = !pfev::geometry::in_dominating_region(F, f);
    }
  }
  const auto q = pfev::geometry::truncation_quantities(pfev::geometry::decompose_dominated(F),
                                                       pfev::geometry::decompose_dominating(F), mean, sd);
  pfev::acquisition::Term t;
  t.z_over = q.z_over;
  t.z_under = q.z_under;
  t.in_over = pfev::geometry::in_dominated_region(F, f);
  t.in_under = true;
  return t;
}

inline std::vector<pfev::acquisition::Term> random_terms(int K, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(2, 4);
  const int L = dim(rng);
  std::vector<pfev::acquisition::Term> terms;
  for (int k = 0; k < K; ++k) terms.push_back(random_term(L, rng));
  return terms;
}

}  // namespace instances
