#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "pfev/harness.hpp"
#include "pfev/studies.hpp"

namespace pfev::results {

inline constexpr int kSchemaVersion = 1;

/// File names inside a run directory.
inline constexpr const char* kHistoryFile = "history.jsonl";
inline constexpr const char* kTimingsFile = "timings.csv";

/// Streams a run to <dir>/history.jsonl (one JSON record per line, header
/// first) and <dir>/timings.csv. Wall-clock data only goes to the timings
/// file, so two runs with the same config produce identical histories.
class RunWriter {
 public:
  RunWriter(const std::string& dir, const RunConfig& cfg);

  /// Observer for harness::run_bo.
  void operator()(const harness::RunHistory& history, const harness::IterationRecord* record);

 private:
  std::string config_json_;
  std::ofstream history_;
  std::ofstream timings_;
};

/// Whole run in one call.
void write_run(const std::string& dir, const RunConfig& cfg, const harness::RunHistory& history);

/// Reads a run directory written by RunWriter; timings are filled when the
/// timings file exists. Throws std::runtime_error on schema mismatch.
harness::RunHistory read_run(const std::string& dir);

/// One row per run: problem, strategy, seed, observations, final hypervolume and RHV.
void write_summary_csv(const std::string& path, const std::vector<harness::RunHistory>& runs);

struct SeriesPoint {
  int iteration = 0;
  double mean = 0.0;
  double sd = 0.0;
  int count = 0;
};

/// RHV mean and sample standard deviation per iteration (0 = initial design)
/// across runs. Runs must have equal length.
std::vector<SeriesPoint> rhv_series(const std::vector<harness::RunHistory>& runs);
void write_series_csv(const std::string& path, const std::string& label, const std::vector<SeriesPoint>& series);

void write_gap_table(const std::string& jsonl_path, const std::string& csv_path,
                     const std::vector<studies::GapRow>& rows);
void write_estimator_table(const std::string& jsonl_path, const std::string& csv_path,
                           const std::vector<studies::EstimatorRow>& rows);

}  // namespace pfev::results
