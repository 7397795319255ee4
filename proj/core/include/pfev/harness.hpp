#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pfev/config.hpp"
#include "pfev/pareto.hpp"
#include "pfev/problems.hpp"

namespace pfev::harness {

/// Wall-clock seconds per phase of one iteration.
struct PhaseTimings {
  double fit = 0.0;
  double paths = 0.0;
  double solver = 0.0;
  double decomposition = 0.0;
  double acquisition = 0.0;
  double evaluation = 0.0;
  double total = 0.0;

  double phase_sum() const { return fit + paths + solver + decomposition + acquisition + evaluation; }
};

struct IterationRecord {
  int iteration = 0;  // 1-based
  Matrix x;           // Q x d chosen inputs (unit box)
  Matrix y;           // Q x L observations (noisy when noise is enabled)
  Matrix f;           // Q x L noiseless objective values
  std::vector<double> lambda;       // per pick, NaN when not applicable
  std::vector<double> acquisition;  // per pick, NaN for random search
  double hypervolume = 0.0;         // observed frontier above the RHV reference point
  double rhv = 0.0;
  PhaseTimings timings;
};

struct RunHistory {
  std::string problem_id;
  std::string strategy;
  std::uint64_t seed = 0;
  Vector reference_point;
  double reference_hypervolume = 0.0;
  int reference_size = 0;
  Matrix initial_x;
  Matrix initial_y;
  Matrix initial_f;
  double initial_hypervolume = 0.0;
  double initial_rhv = 0.0;
  std::vector<IterationRecord> iterations;

  int num_observations() const;
  double final_rhv() const { return iterations.empty() ? initial_rhv : iterations.back().rhv; }
};

/// Componentwise minimum of the reference frontier minus 1e-6.
Vector rhv_reference_point(const ParetoSet& reference);

/// Hypervolume of the non-dominated observed points divided by that of the
/// reference frontier, both above rhv_reference_point(reference).
double rhv(const Matrix& observed, const ParetoSet& reference);

/// Called after the initial design (record == nullptr) and after every iteration.
using Observer = std::function<void(const RunHistory&, const IterationRecord*)>;

/// Full optimization loop against a known reference frontier.
RunHistory run_bo(const RunConfig& cfg, const problems::Problem& problem, const ParetoSet& reference,
                  const Observer& observer = {});

/// Builds the problem and its (cached) reference frontier from the config.
RunHistory run_bo(const RunConfig& cfg, const Observer& observer = {});

}  // namespace pfev::harness
