#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pfev/acquisition.hpp"
#include "pfev/direct.hpp"
#include "pfev/gp.hpp"
#include "pfev/nsga2.hpp"
#include "pfev/problems.hpp"
#include "pfev/reference_frontier.hpp"

namespace pfev {

/// Invalid or unreadable configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ProblemSpec {
  std::string kind = "synthetic";  // synthetic | named | combined
  std::string name;                // named problems
  int d = 2;
  int L = 3;
  double length_scale = 0.1;
  /// Synthetic problems only; unset means "use the run seed".
  std::optional<std::uint64_t> seed;
  int num_features = 1000;
  std::vector<ProblemSpec> parts;  // combined problems
};

problems::Problem make_problem(const ProblemSpec& spec, std::uint64_t run_seed);

enum class Strategy { kPfevMap, kPfevMc, kPfevLambda1, kPfevLambdaMin, kParego, kRandom };

std::string to_string(Strategy s);
/// Throws ConfigError for unknown names.
Strategy parse_strategy(const std::string& name);
bool is_pfev(Strategy s);

struct NoiseSettings {
  bool enabled = false;
  double stddev = 0.1;
  int draws = 4;
};

struct RunConfig {
  ProblemSpec problem;
  Strategy strategy = Strategy::kPfevMap;
  int iterations = 50;
  int initial_points = 5;
  int num_samples = 10;
  int num_features = 500;
  nsga2::Config nsga2{50, 1000};
  /// Zero means the default budget 200 (d + 1).
  direct::Config direct{0};
  int batch_size = 1;
  /// Route single-point selection through the conditional (batch) code path.
  bool force_cmi = false;
  NoiseSettings noise;
  gp::FitOptions fit;
  bool normalize_outputs = true;
  acquisition::LambdaPolicy lambda;
  double map_r = 1.0;
  double parego_rho = 0.05;
  reference::Config reference;
  std::uint64_t seed = 0;
  std::string output;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// Parses a JSON document; missing fields keep their defaults. Throws
/// ConfigError on syntax errors, unknown keys or bad values.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
/// JSON with every field, suitable for parse_run_config.
std::string to_json(const RunConfig& cfg);

}  // namespace pfev
