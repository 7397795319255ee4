#include "pfev/direct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace pfev::direct {

namespace {

struct Rect {
  Vector center;             // unit-cube coordinates
  std::vector<int> level;    // side length of dimension k is 3^-level[k]
  double value = 0.0;        // minimization value (-f)
  double half_diagonal = 0.0;
};

double half_diagonal(std::vector<int> levels) {
  std::sort(levels.begin(), levels.end());
  double s = 0.0;
  for (int l : levels) s += std::pow(3.0, -2.0 * l);
  return 0.5 * std::sqrt(s);
}

// Indices of potentially optimal rectangles under the lower-convex-hull rule.
std::vector<std::size_t> potentially_optimal(const std::vector<Rect>& rects, double epsilon) {
  std::map<double, std::size_t> best_by_size;
  double fmin = kInf;
  for (std::size_t i = 0; i < rects.size(); ++i) {
    fmin = std::min(fmin, rects[i].value);
    auto [it, inserted] = best_by_size.emplace(rects[i].half_diagonal, i);
    if (!inserted && rects[i].value < rects[it->second].value) it->second = i;
  }
  std::vector<std::pair<double, std::size_t>> groups(best_by_size.begin(), best_by_size.end());
  std::vector<std::size_t> chosen;
  const double target = fmin - epsilon * std::abs(fmin);
  for (std::size_t j = 0; j < groups.size(); ++j) {
    const double dj = groups[j].first;
    const double fj = rects[groups[j].second].value;
    double k_lo = 0.0;
    double k_hi = kInf;
    for (std::size_t i = 0; i < j; ++i) {
      k_lo = std::max(k_lo, (fj - rects[groups[i].second].value) / (dj - groups[i].first));
    }
    for (std::size_t i = j + 1; i < groups.size(); ++i) {
      k_hi = std::min(k_hi, (rects[groups[i].second].value - fj) / (groups[i].first - dj));
    }
    if (k_lo > k_hi) continue;
    if (k_hi < kInf && fj - k_hi * dj > target) continue;
    chosen.push_back(groups[j].second);
  }
  return chosen;
}

}  // namespace

void Config::validate() const {
  require(max_evaluations >= 1, "direct: max_evaluations must be >= 1");
  require(max_iterations >= 1, "direct: max_iterations must be >= 1");
  require(epsilon >= 0.0, "direct: epsilon must be non-negative");
}

Config Config::for_dimension(int d) {
  Config c;
  c.max_evaluations = 200 * (d + 1);
  return c;
}

Result maximize(const std::function<double(const Vector&)>& f, const Box& domain, const Config& cfg) {
  cfg.validate();
  const int d = domain.dim();
  require(d >= 1, "direct: empty domain");
  const Vector width = domain.upper - domain.lower;

  Result result;
  auto evaluate = [&](const Vector& unit) {
    const Vector x = domain.lower + width.cwiseProduct(unit);
    const double v = f(x);
    ++result.evaluations;
    if (result.evaluations == 1 || v > result.value) {
      result.value = v;
      result.x = x;
    }
    return -v;
  };

  std::vector<Rect> rects;
  {
    Rect root;
    root.center = Vector::Constant(d, 0.5);
    root.level.assign(static_cast<std::size_t>(d), 0);
    root.value = evaluate(root.center);
    root.half_diagonal = half_diagonal(root.level);
    rects.push_back(std::move(root));
  }

  bool exhausted = false;
  while (!exhausted && result.iterations < cfg.max_iterations && result.evaluations < cfg.max_evaluations) {
    ++result.iterations;
    const auto selected = potentially_optimal(rects, cfg.epsilon);
    for (std::size_t idx : selected) {
      const int min_level = *std::min_element(rects[idx].level.begin(), rects[idx].level.end());
      std::vector<int> dims;
      for (int k = 0; k < d; ++k) {
        if (rects[idx].level[static_cast<std::size_t>(k)] == min_level) dims.push_back(k);
      }
      if (result.evaluations + 2 * static_cast<int>(dims.size()) > cfg.max_evaluations) {
        exhausted = true;
        break;
      }
      const double delta = std::pow(3.0, -(min_level + 1));
      std::vector<Rect> children;
      std::vector<double> w;
      for (int k : dims) {
        Rect plus;
        plus.center = rects[idx].center;
        plus.center[k] += delta;
        plus.value = evaluate(plus.center);
        Rect minus;
        minus.center = rects[idx].center;
        minus.center[k] -= delta;
        minus.value = evaluate(minus.center);
        w.push_back(std::min(plus.value, minus.value));
        children.push_back(std::move(plus));
        children.push_back(std::move(minus));
      }
      std::vector<std::size_t> order(dims.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });

      // Trisect along the best dimensions first so they get the largest pieces.
      std::vector<int> level = rects[idx].level;
      for (std::size_t o : order) {
        level[static_cast<std::size_t>(dims[o])] += 1;
        for (std::size_t c = 2 * o; c < 2 * o + 2; ++c) {
          children[c].level = level;
          children[c].half_diagonal = half_diagonal(level);
        }
      }
      rects[idx].level = level;
      rects[idx].half_diagonal = half_diagonal(level);
      for (auto& c : children) rects.push_back(std::move(c));
    }
    if (selected.empty()) break;
  }
  return result;
}

}  // namespace pfev::direct
