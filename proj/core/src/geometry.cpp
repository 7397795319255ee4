#include "pfev/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "pfev/normal.hpp"

namespace pfev::geometry {

namespace {

struct Task {
  Vector lower;
  Matrix points;
};

Matrix select_rows(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

// Pivot with the largest box volume above the (proxied) lower corner.
int choose_pivot(const Task& task) {
  const Eigen::Index dims = task.points.cols();
  Vector proxy(dims);
  for (Eigen::Index k = 0; k < dims; ++k) {
    proxy[k] = std::isfinite(task.lower[k]) ? task.lower[k] : task.points.col(k).minCoeff() - 1.0;
  }
  int best = 0;
  double best_volume = -1.0;
  for (Eigen::Index i = 0; i < task.points.rows(); ++i) {
    double v = 1.0;
    for (Eigen::Index k = 0; k < dims; ++k) v *= task.points(i, k) - proxy[k];
    if (v > best_volume) {
      best_volume = v;
      best = static_cast<int>(i);
    }
  }
  return best;
}

struct RawCells {
  std::vector<double> lower;
  std::vector<double> upper;
  std::size_t count = 0;
};

// Splits (lower, inf) at the pivot p into the box (lower, p] and the slabs
// S_l = {f_k <= p_k for k < l, f_l > p_l}; each slab is a smaller instance of
// the same problem on the clipped points that reach into it.
RawCells split_recursively(Task root, std::size_t max_cells) {
  RawCells out;
  const Eigen::Index dims = root.points.cols();
  std::vector<Task> stack;
  stack.push_back(std::move(root));
  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();
    if (task.points.rows() == 0) continue;
    const int pivot_row = choose_pivot(task);
    const Vector pivot = task.points.row(pivot_row).transpose();

    if (++out.count > max_cells) throw NumericalError("cell decomposition exceeds the max-cells guard");
    for (Eigen::Index k = 0; k < dims; ++k) {
      out.lower.push_back(task.lower[k]);
      out.upper.push_back(pivot[k]);
    }
    if (task.points.rows() == 1) continue;

    for (Eigen::Index l = dims - 1; l >= 0; --l) {
      Matrix sub(task.points.rows(), dims);
      Eigen::Index m = 0;
      for (Eigen::Index i = 0; i < task.points.rows(); ++i) {
        if (task.points(i, l) <= pivot[l]) continue;
        sub.row(m) = task.points.row(i);
        for (Eigen::Index k = 0; k < l; ++k) sub(m, k) = std::min(sub(m, k), pivot[k]);
        ++m;
      }
      if (m == 0) continue;
      sub.conservativeResize(m, Eigen::NoChange);
      Task child;
      child.lower = task.lower;
      child.lower[l] = pivot[l];
      child.points = (m == 1) ? std::move(sub) : select_rows(sub, non_dominated_indices(sub));
      stack.push_back(std::move(child));
    }
  }
  return out;
}


}  // namespace

Cell CellDecomposition::cell(int i) const {
  Cell c{Vector(num_objectives()), Vector(num_objectives())};
  for (int l = 0; l < num_objectives(); ++l) {
    const std::int32_t lo = lower_index(i, l);
    c.lower[l] = lo < 0 ? -kInf : breakpoints_[static_cast<std::size_t>(l)][static_cast<std::size_t>(lo)];
    c.upper[l] = breakpoints_[static_cast<std::size_t>(l)][static_cast<std::size_t>(upper_index(i, l))];
  }
  return c;
}

bool CellDecomposition::cell_contains(int i, const Vector& f) const {
  const Cell c = cell(i);
  return ((f.array() > c.lower.array()) && (f.array() <= c.upper.array())).all();
}

double CellDecomposition::volume() const {
  require(lower_corner_.size() == num_objectives() && lower_corner_.allFinite(),
          "CellDecomposition::volume: needs a finite lower corner");
  double total = 0.0;
  for (int i = 0; i < num_cells_; ++i) {
    double v = 1.0;
    for (int l = 0; l < num_objectives(); ++l) {
      const auto& bp = breakpoints_[static_cast<std::size_t>(l)];
      v *= bp[static_cast<std::size_t>(upper_index(i, l))] - bp[static_cast<std::size_t>(lower_index(i, l))];
    }
    total += v;
  }
  return total;
}

CellDecomposition decompose_dominated(const Matrix& frontier, const Vector& lower_corner, std::size_t max_cells) {
  const Eigen::Index dims = frontier.cols();
  require(dims >= 1, "decompose_dominated: frontier has no objectives");
  Vector lower = lower_corner.size() == 0 ? Vector::Constant(dims, -kInf) : lower_corner;
  require(lower.size() == dims, "decompose_dominated: lower corner dimension mismatch");

  std::vector<int> inside;
  for (Eigen::Index i = 0; i < frontier.rows(); ++i) {
    if ((frontier.row(i).transpose().array() > lower.array()).all()) inside.push_back(static_cast<int>(i));
  }
  Matrix kept = select_rows(frontier, inside);
  Task root{lower, select_rows(kept, non_dominated_indices(kept))};

  CellDecomposition out;
  out.source_ = frontier;
  out.lower_corner_ = lower;
  out.orientation_ = Orientation::kOver;
  RawCells raw = split_recursively(std::move(root), max_cells);

  out.num_cells_ = static_cast<int>(raw.count);
  out.breakpoints_.assign(static_cast<std::size_t>(dims), {});
  for (Eigen::Index l = 0; l < dims; ++l) {
    auto& bp = out.breakpoints_[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < raw.count; ++i) {
      const double lo = raw.lower[i * dims + l];
      if (std::isfinite(lo)) bp.push_back(lo);
      bp.push_back(raw.upper[i * dims + l]);
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  }
  out.lower_.resize(raw.count * dims);
  out.upper_.resize(raw.count * dims);
  for (std::size_t i = 0; i < raw.count; ++i) {
    for (Eigen::Index l = 0; l < dims; ++l) {
      const auto& bp = out.breakpoints_[static_cast<std::size_t>(l)];
      const double lo = raw.lower[i * dims + l];
      const double up = raw.upper[i * dims + l];
      out.lower_[i * dims + l] =
          std::isfinite(lo) ? static_cast<std::int32_t>(std::lower_bound(bp.begin(), bp.end(), lo) - bp.begin()) : -1;
      out.upper_[i * dims + l] = static_cast<std::int32_t>(std::lower_bound(bp.begin(), bp.end(), up) - bp.begin());
    }
  }
  return out;
}

CellDecomposition decompose_dominated(const ParetoSet& frontier, std::size_t max_cells) {
  return decompose_dominated(frontier.points, Vector(), max_cells);
}

CellDecomposition decompose_dominating(const Matrix& frontier, std::size_t max_cells) {
  CellDecomposition out = decompose_dominated(Matrix(-frontier), Vector(), max_cells);
  out.orientation_ = Orientation::kFlipped;
  return out;
}

double cell_probability(const CellDecomposition& cells, const Vector& mean, const Vector& stddev) {
  const int dims = cells.num_objectives();
  require(mean.size() == dims && stddev.size() == dims, "cell_probability: dimension mismatch");
  if (cells.size() == 0) return 0.0;

  // Per breakpoint: the smaller tail mass and which side of the mean it is on,
  // so box masses far in the upper tail do not cancel catastrophically.
  thread_local std::vector<std::vector<double>> tail;
  thread_local std::vector<std::vector<unsigned char>> upper_side;
  tail.resize(static_cast<std::size_t>(dims));
  upper_side.resize(static_cast<std::size_t>(dims));
  for (int l = 0; l < dims; ++l) {
    const auto& bp = cells.breakpoints(l);
    auto& t = tail[static_cast<std::size_t>(l)];
    auto& side = upper_side[static_cast<std::size_t>(l)];
    t.resize(bp.size());
    side.resize(bp.size());
    const double inv = 1.0 / stddev[l];
    for (std::size_t i = 0; i < bp.size(); ++i) {
      const double z = (bp[i] - mean[l]) * inv;
      side[i] = z > 0.0;
      t[i] = std::fabs(z);
    }
    normal_tail_inplace(t.data(), static_cast<long>(t.size()));
  }

  double total = 0.0;
  for (int i = 0; i < cells.size(); ++i) {
    double mass = 1.0;
    for (int l = 0; l < dims; ++l) {
      const auto& t = tail[static_cast<std::size_t>(l)];
      const auto& side = upper_side[static_cast<std::size_t>(l)];
      const std::int32_t up = cells.upper_index(i, l);
      const std::int32_t lo = cells.lower_index(i, l);
      const double t_up = t[static_cast<std::size_t>(up)];
      double factor;
      if (lo < 0) {
        factor = side[static_cast<std::size_t>(up)] ? 1.0 - t_up : t_up;
      } else {
        const double t_lo = t[static_cast<std::size_t>(lo)];
        const bool up_side = side[static_cast<std::size_t>(up)];
        const bool lo_side = side[static_cast<std::size_t>(lo)];
        if (!up_side) {
          factor = t_up - t_lo;
        } else if (lo_side) {
          factor = t_lo - t_up;
        } else {
          factor = 1.0 - t_up - t_lo;
        }
      }
      mass *= std::max(factor, 0.0);
    }
    total += mass;
  }
  return std::clamp(total, 0.0, 1.0);
}

double dominating_probability(const CellDecomposition& flipped, const Vector& mean, const Vector& stddev) {
  return cell_probability(flipped, Vector(-mean), stddev);
}

TruncationQuantities truncation_quantities(const CellDecomposition& over, const CellDecomposition& flipped,
                                           const Vector& mean, const Vector& stddev) {
  const double p_over = cell_probability(over, mean, stddev);
  const double p_dominating = dominating_probability(flipped, mean, stddev);
  TruncationQuantities q;
  q.z_under = std::clamp(1.0 - p_dominating, kProbabilityFloor, kProbabilityCeiling);
  q.z_over = std::clamp(p_over, kProbabilityFloor, q.z_under);
  q.p_hat = q.z_over / q.z_under;
  return q;
}

bool in_dominated_region(const Matrix& frontier, const Vector& f) {
  for (Eigen::Index i = 0; i < frontier.rows(); ++i) {
    if ((f.array() <= frontier.row(i).transpose().array()).all()) return true;
  }
  return false;
}

bool in_dominating_region(const Matrix& frontier, const Vector& f) {
  for (Eigen::Index i = 0; i < frontier.rows(); ++i) {
    if (dominates(f, frontier.row(i).transpose())) return true;
  }
  return false;
}

double hypervolume(const Matrix& frontier, const Vector& reference) {
  require(reference.size() == frontier.cols(), "hypervolume: reference dimension mismatch");
  if (frontier.rows() == 0) return 0.0;
  return decompose_dominated(frontier, reference).volume();
}

double hypervolume(const ParetoSet& frontier, const Vector& reference) {
  return hypervolume(frontier.points, reference);
}

}  // namespace pfev::geometry
