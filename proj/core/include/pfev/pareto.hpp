#pragma once

#include <vector>

#include "pfev/common.hpp"

namespace pfev {

/// a dominates b: a >= b componentwise with at least one strict inequality.
/// Throws std::invalid_argument on dimension mismatch.
bool dominates(const Vector& a, const Vector& b);

/// a is dominated by or equal to b (a <= b componentwise).
bool dominated_or_equal(const Vector& a, const Vector& b);

/// Finite set of mutually non-dominated objective vectors, one per row.
struct ParetoSet {
  Matrix points;  // m x L
  Matrix inputs;  // m x d when known, otherwise 0 x 0

  int size() const { return static_cast<int>(points.rows()); }
  int num_objectives() const { return static_cast<int>(points.cols()); }
  bool empty() const { return points.rows() == 0; }
  bool has_inputs() const { return inputs.rows() == points.rows() && inputs.cols() > 0; }
  Vector point(int i) const { return points.row(i).transpose(); }

  /// Verifies mutual non-dominance and absence of duplicates.
  bool is_valid() const;
};

/// Row indices of the non-dominated rows of `points`, one index per distinct
/// vector, sorted in descending lexicographic order of the rows.
std::vector<int> non_dominated_indices(const Matrix& points);

/// Non-dominated subset of the rows of `points`; duplicates collapse to one.
/// When `inputs` is non-empty its rows are carried along.
ParetoSet non_dominated_filter(const Matrix& points, const Matrix& inputs = Matrix());

}  // namespace pfev
