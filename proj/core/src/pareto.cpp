#include "pfev/pareto.hpp"

#include <algorithm>
#include <numeric>

namespace pfev {

namespace {

bool row_dominates(const Matrix& m, Eigen::Index a, Eigen::Index b) {
  bool strict = false;
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    if (m(a, k) < m(b, k)) return false;
    if (m(a, k) > m(b, k)) strict = true;
  }
  return strict;
}

bool rows_equal(const Matrix& m, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    if (m(a, k) != m(b, k)) return false;
  }
  return true;
}

}  // namespace

bool dominates(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "dominates: dimension mismatch");
  bool strict = false;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a[k] < b[k]) return false;
    if (a[k] > b[k]) strict = true;
  }
  return strict;
}

bool dominated_or_equal(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "dominated_or_equal: dimension mismatch");
  return (a.array() <= b.array()).all();
}

bool ParetoSet::is_valid() const {
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.rows(); ++j) {
      if (i == j) continue;
      if (rows_equal(points, i, j) || row_dominates(points, i, j)) return false;
    }
  }
  return true;
}

std::vector<int> non_dominated_indices(const Matrix& points) {
  const int n = static_cast<int>(points.rows());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  // A dominator always precedes what it dominates in descending lexicographic
  // order, so one forward pass against the kept rows suffices.
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    for (Eigen::Index k = 0; k < points.cols(); ++k) {
      if (points(a, k) != points(b, k)) return points(a, k) > points(b, k);
    }
    return false;
  });
  std::vector<int> kept;
  for (int idx : order) {
    if (!kept.empty() && rows_equal(points, kept.back(), idx)) continue;
    bool dominated = false;
    for (int k : kept) {
      if (row_dominates(points, k, idx)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(idx);
  }
  return kept;
}

ParetoSet non_dominated_filter(const Matrix& points, const Matrix& inputs) {
  const bool with_inputs = inputs.size() > 0;
  require(!with_inputs || inputs.rows() == points.rows(), "non_dominated_filter: inputs length mismatch");
  const std::vector<int> kept = non_dominated_indices(points);
  ParetoSet out;
  out.points.resize(static_cast<Eigen::Index>(kept.size()), points.cols());
  if (with_inputs) out.inputs.resize(static_cast<Eigen::Index>(kept.size()), inputs.cols());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    out.points.row(static_cast<Eigen::Index>(i)) = points.row(kept[i]);
    if (with_inputs) out.inputs.row(static_cast<Eigen::Index>(i)) = inputs.row(kept[i]);
  }
  return out;
}

}  // namespace pfev
