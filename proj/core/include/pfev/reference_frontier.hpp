#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "pfev/pareto.hpp"
#include "pfev/problems.hpp"

namespace pfev {

const char* version();

namespace reference {

struct Config {
  int generations = 10000;
  int population = 100;
  std::uint64_t seed = 0;
  /// Cache directory; empty disables caching.
  std::string cache_dir;
};

/// Cache file name for (problem id, seed, budget).
std::string cache_file_name(const std::string& problem_id, const Config& cfg);

/// Long NSGA-II run on the true problem; read from / written to the cache
/// when cfg.cache_dir is set.
ParetoSet build(const problems::Problem& problem, const Config& cfg);

struct FrontierFile {
  std::map<std::string, std::string> header;
  ParetoSet frontier;
};

/// Plain text: "# key value" header lines followed by one point per line
/// (objectives, then inputs), written with round-trip precision.
void write_frontier(const std::string& path, const ParetoSet& frontier,
                    const std::map<std::string, std::string>& header);
/// Returns nullopt if the file does not exist; throws std::runtime_error if it
/// is malformed.
std::optional<FrontierFile> read_frontier(const std::string& path);

}  // namespace reference
}  // namespace pfev
