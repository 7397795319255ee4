#pragma once

#include <cstdint>
#include <vector>

#include "pfev/common.hpp"
#include "pfev/pareto.hpp"

namespace pfev::geometry {

/// Half-open box (lower, upper]; lower entries may be -inf.
struct Cell {
  Vector lower;
  Vector upper;
};

enum class Orientation {
  kOver,     // region dominated by the frontier
  kFlipped,  // region dominating the frontier, stored in sign-flipped coordinates
};

inline constexpr std::size_t kDefaultMaxCells = 5'000'000;

/// Disjoint boxes whose union is {f : f <= p for some frontier point p},
/// optionally clipped below at a finite lower corner. Bounds are stored as
/// indices into per-objective breakpoint tables so that probabilities need one
/// CDF evaluation per distinct coordinate rather than per cell.
class CellDecomposition {
 public:
  CellDecomposition() = default;

  int size() const { return num_cells_; }
  int num_objectives() const { return static_cast<int>(breakpoints_.size()); }
  Orientation orientation() const { return orientation_; }
  /// Frontier in the coordinates the cells live in (negated when flipped).
  const Matrix& source() const { return source_; }
  const Vector& lower_corner() const { return lower_corner_; }
  const std::vector<double>& breakpoints(int l) const { return breakpoints_[static_cast<std::size_t>(l)]; }

  Cell cell(int i) const;
  /// Whether f lies inside cell i.
  bool cell_contains(int i, const Vector& f) const;
  /// Sum of cell volumes; requires a finite lower corner.
  double volume() const;

  /// Index of the lower (upper) bound of cell i in objective l; -1 is -inf.
  std::int32_t lower_index(int i, int l) const { return lower_[static_cast<std::size_t>(i * num_objectives() + l)]; }
  std::int32_t upper_index(int i, int l) const { return upper_[static_cast<std::size_t>(i * num_objectives() + l)]; }

 private:
  friend CellDecomposition decompose_dominated(const Matrix&, const Vector&, std::size_t);
  friend CellDecomposition decompose_dominating(const Matrix&, std::size_t);

  Matrix source_;
  Vector lower_corner_;
  Orientation orientation_ = Orientation::kOver;
  std::vector<std::vector<double>> breakpoints_;
  std::vector<std::int32_t> lower_;
  std::vector<std::int32_t> upper_;
  int num_cells_ = 0;
};

/// Disjoint decomposition of the region dominated by the rows of `frontier`
/// (which must be mutually non-dominated). With an all -inf `lower_corner`
/// (or an empty vector) the cells are unbounded below. Points that do not
/// strictly exceed a finite lower corner in every objective contribute nothing.
/// Throws NumericalError when more than `max_cells` cells would be produced.
CellDecomposition decompose_dominated(const Matrix& frontier, const Vector& lower_corner = Vector(),
                                      std::size_t max_cells = kDefaultMaxCells);
CellDecomposition decompose_dominated(const ParetoSet& frontier, std::size_t max_cells = kDefaultMaxCells);

/// Region {f : p <= f for some frontier point p} as a dominated region of the
/// negated frontier.
CellDecomposition decompose_dominating(const Matrix& frontier, std::size_t max_cells = kDefaultMaxCells);

/// P(f in union of cells) for f ~ N(mean, diag(stddev^2)). std must be > 0.
double cell_probability(const CellDecomposition& cells, const Vector& mean, const Vector& stddev);

/// Probability floor and ceiling applied to truncation normalizers.
inline constexpr double kProbabilityFloor = 1e-300;
inline constexpr double kProbabilityCeiling = 1.0 - 1e-16;

struct TruncationQuantities {
  double z_over = 0.0;   // P(f in A_O)
  double z_under = 0.0;  // P(f in A_U)
  double p_hat = 0.0;    // z_over / z_under
};

/// Z_O from the over-cells and Z_U = 1 - P(-f in flipped cells), clamped to
/// [kProbabilityFloor, kProbabilityCeiling] with z_over <= z_under.
TruncationQuantities truncation_quantities(const CellDecomposition& over, const CellDecomposition& flipped,
                                           const Vector& mean, const Vector& stddev);

/// Unclamped P(f not in A_U) = P(-f in flipped cells).
double dominating_probability(const CellDecomposition& flipped, const Vector& mean, const Vector& stddev);

/// f in A_O: dominated by or equal to some frontier row.
bool in_dominated_region(const Matrix& frontier, const Vector& f);
/// f outside A_U: strictly dominates some frontier row. Frontier points
/// themselves lie in A_O, which is contained in A_U.
bool in_dominating_region(const Matrix& frontier, const Vector& f);

/// Lebesgue measure of the region dominated by `frontier` above `reference`.
/// Points not strictly above the reference in every objective are ignored.
double hypervolume(const Matrix& frontier, const Vector& reference);
double hypervolume(const ParetoSet& frontier, const Vector& reference);

}  // namespace pfev::geometry
