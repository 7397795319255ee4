#include "pfev/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace pfev::nsga2 {

namespace {

bool row_dominates(const Matrix& v, int a, int b) {
  bool strict = false;
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    if (v(a, k) < v(b, k)) return false;
    if (v(a, k) > v(b, k)) strict = true;
  }
  return strict;
}

class Variation {
 public:
  Variation(const Config& cfg, const Box& domain, std::mt19937_64& rng)
      : cfg_(cfg), domain_(domain), rng_(rng), uniform_(0.0, 1.0) {
    mutation_prob_ = cfg.mutation_prob > 0.0 ? cfg.mutation_prob : 1.0 / domain.dim();
  }

  double rand() { return uniform_(rng_); }

  // Simulated binary crossover with bounded spread.
  void crossover(Vector& c1, Vector& c2) {
    if (rand() > cfg_.crossover_prob) return;
    const double eta = cfg_.crossover_eta;
    for (int i = 0; i < domain_.dim(); ++i) {
      if (rand() > 0.5) continue;
      if (std::abs(c1[i] - c2[i]) <= 1e-14) continue;
      const double y1 = std::min(c1[i], c2[i]);
      const double y2 = std::max(c1[i], c2[i]);
      const double lo = domain_.lower[i];
      const double hi = domain_.upper[i];
      const double r = rand();

      auto spread = [&](double beta) {
        const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
        if (r <= 1.0 / alpha) return std::pow(r * alpha, 1.0 / (eta + 1.0));
        return std::pow(1.0 / (2.0 - r * alpha), 1.0 / (eta + 1.0));
      };
      const double bq1 = spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1));
      double child1 = 0.5 * ((y1 + y2) - bq1 * (y2 - y1));
      const double bq2 = spread(1.0 + 2.0 * (hi - y2) / (y2 - y1));
      double child2 = 0.5 * ((y1 + y2) + bq2 * (y2 - y1));
      child1 = std::clamp(child1, lo, hi);
      child2 = std::clamp(child2, lo, hi);
      if (rand() <= 0.5) std::swap(child1, child2);
      c1[i] = child1;
      c2[i] = child2;
    }
  }

  // Polynomial mutation.
  void mutate(Vector& c) {
    const double eta = cfg_.mutation_eta;
    const double power = 1.0 / (eta + 1.0);
    for (int i = 0; i < domain_.dim(); ++i) {
      if (rand() > mutation_prob_) continue;
      const double lo = domain_.lower[i];
      const double hi = domain_.upper[i];
      const double width = hi - lo;
      if (width <= 0.0) continue;
      const double d1 = (c[i] - lo) / width;
      const double d2 = (hi - c[i]) / width;
      const double r = rand();
      double dq;
      if (r <= 0.5) {
        const double val = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, eta + 1.0);
        dq = std::pow(val, power) - 1.0;
      } else {
        const double val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, eta + 1.0);
        dq = 1.0 - std::pow(val, power);
      }
      c[i] = std::clamp(c[i] + dq * width, lo, hi);
    }
  }

 private:
  const Config& cfg_;
  const Box& domain_;
  std::mt19937_64& rng_;
  std::uniform_real_distribution<double> uniform_;
  double mutation_prob_ = 0.0;
};

struct Ranking {
  std::vector<int> rank;
  std::vector<double> crowding;
};

Ranking rank_population(const Matrix& values) {
  const int n = static_cast<int>(values.rows());
  Ranking r{std::vector<int>(static_cast<std::size_t>(n)), std::vector<double>(static_cast<std::size_t>(n))};
  const auto fronts = non_dominated_sort(values);
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    const auto dist = crowding_distance(values, fronts[f]);
    for (std::size_t i = 0; i < fronts[f].size(); ++i) {
      r.rank[static_cast<std::size_t>(fronts[f][i])] = static_cast<int>(f);
      r.crowding[static_cast<std::size_t>(fronts[f][i])] = dist[i];
    }
  }
  return r;
}

}  // namespace

void Config::validate() const {
  require(population >= 4 && population % 2 == 0, "nsga2: population must be even and >= 4");
  require(generations >= 1, "nsga2: generations must be >= 1");
  require(crossover_prob >= 0.0 && crossover_prob <= 1.0, "nsga2: crossover probability outside [0, 1]");
  require(crossover_eta >= 0.0 && mutation_eta >= 0.0, "nsga2: distribution indices must be non-negative");
}

std::vector<std::vector<int>> non_dominated_sort(const Matrix& values) {
  const int n = static_cast<int>(values.rows());
  std::vector<std::vector<int>> dominated_by_me(static_cast<std::size_t>(n));
  std::vector<int> domination_count(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> fronts(1);
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      if (row_dominates(values, p, q)) {
        dominated_by_me[static_cast<std::size_t>(p)].push_back(q);
        ++domination_count[static_cast<std::size_t>(q)];
      } else if (row_dominates(values, q, p)) {
        dominated_by_me[static_cast<std::size_t>(q)].push_back(p);
        ++domination_count[static_cast<std::size_t>(p)];
      }
    }
  }
  for (int p = 0; p < n; ++p) {
    if (domination_count[static_cast<std::size_t>(p)] == 0) fronts[0].push_back(p);
  }
  for (std::size_t f = 0; !fronts[f].empty(); ++f) {
    std::vector<int> next;
    for (int p : fronts[f]) {
      for (int q : dominated_by_me[static_cast<std::size_t>(p)]) {
        if (--domination_count[static_cast<std::size_t>(q)] == 0) next.push_back(q);
      }
    }
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

std::vector<double> crowding_distance(const Matrix& values, const std::vector<int>& front) {
  const std::size_t m = front.size();
  std::vector<double> dist(m, 0.0);
  if (m <= 2) {
    std::fill(dist.begin(), dist.end(), kInf);
    return dist;
  }
  std::vector<std::size_t> order(m);
  for (Eigen::Index k = 0; k < values.cols(); ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values(front[a], k) < values(front[b], k); });
    const double lo = values(front[order.front()], k);
    const double hi = values(front[order.back()], k);
    dist[order.front()] = kInf;
    dist[order.back()] = kInf;
    if (hi - lo <= 0.0) continue;
    for (std::size_t i = 1; i + 1 < m; ++i) {
      dist[order[i]] += (values(front[order[i + 1]], k) - values(front[order[i - 1]], k)) / (hi - lo);
    }
  }
  return dist;
}

ParetoSet solve(const BatchObjective& objective, const Box& domain, const Config& config) {
  config.validate();
  require(domain.dim() >= 1, "nsga2: empty domain");
  const int n = config.population;
  const int d = domain.dim();
  std::mt19937_64 rng(config.seed);
  Variation variation(config, domain, rng);

  Matrix pop(n, d);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) {
      pop(i, k) = domain.lower[k] + variation.rand() * (domain.upper[k] - domain.lower[k]);
    }
  }
  Matrix values = objective(pop);
  require(values.rows() == n, "nsga2: objective returned the wrong number of rows");
  Ranking ranking = rank_population(values);

  auto tournament = [&]() {
    const int a = static_cast<int>(variation.rand() * n) % n;
    const int b = static_cast<int>(variation.rand() * n) % n;
    const auto ua = static_cast<std::size_t>(a);
    const auto ub = static_cast<std::size_t>(b);
    if (ranking.rank[ua] != ranking.rank[ub]) return ranking.rank[ua] < ranking.rank[ub] ? a : b;
    if (ranking.crowding[ua] != ranking.crowding[ub]) return ranking.crowding[ua] > ranking.crowding[ub] ? a : b;
    return variation.rand() <= 0.5 ? a : b;
  };

  Matrix offspring(n, d);
  Matrix merged_pop(2 * n, d);
  Matrix merged_val(2 * n, values.cols());
  for (int gen = 0; gen < config.generations; ++gen) {
    for (int i = 0; i < n; i += 2) {
      Vector c1 = pop.row(tournament()).transpose();
      Vector c2 = pop.row(tournament()).transpose();
      variation.crossover(c1, c2);
      variation.mutate(c1);
      variation.mutate(c2);
      offspring.row(i) = c1.transpose();
      offspring.row(i + 1) = c2.transpose();
    }
    const Matrix offspring_values = objective(offspring);
    merged_pop << pop, offspring;
    merged_val << values, offspring_values;

    const auto fronts = non_dominated_sort(merged_val);
    std::vector<int> survivors;
    survivors.reserve(static_cast<std::size_t>(n));
    for (const auto& front : fronts) {
      if (survivors.size() + front.size() <= static_cast<std::size_t>(n)) {
        survivors.insert(survivors.end(), front.begin(), front.end());
        continue;
      }
      const auto dist = crowding_distance(merged_val, front);
      std::vector<std::size_t> order(front.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
      for (std::size_t i = 0; survivors.size() < static_cast<std::size_t>(n); ++i) survivors.push_back(front[order[i]]);
      break;
    }
    for (int i = 0; i < n; ++i) {
      pop.row(i) = merged_pop.row(survivors[static_cast<std::size_t>(i)]);
      values.row(i) = merged_val.row(survivors[static_cast<std::size_t>(i)]);
    }
    ranking = rank_population(values);
  }
  return non_dominated_filter(values, pop);
}

ParetoSet solve(const PointObjective& objective, const Box& domain, const Config& config) {
  BatchObjective batch = [&objective](const Matrix& x) {
    Matrix out;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Vector y = objective(x.row(i).transpose());
      if (i == 0) out.resize(x.rows(), y.size());
      out.row(i) = y.transpose();
    }
    return out;
  };
  return solve(batch, domain, config);
}

}  // namespace pfev::nsga2
