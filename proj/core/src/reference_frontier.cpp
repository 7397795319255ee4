#include "pfev/reference_frontier.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pfev/nsga2.hpp"

#ifndef PFEV_VERSION
#define PFEV_VERSION "0.0.0"
#endif

namespace pfev {

const char* version() { return PFEV_VERSION; }

namespace reference {

namespace {

std::string sanitize(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_';
    if (!ok) c = '_';
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string cache_file_name(const std::string& problem_id, const Config& cfg) {
  return sanitize(problem_id) + "_s" + std::to_string(cfg.seed) + "_g" + std::to_string(cfg.generations) + "_p" +
         std::to_string(cfg.population) + ".frontier";
}

void write_frontier(const std::string& path, const ParetoSet& frontier,
                    const std::map<std::string, std::string>& header) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  // Write then rename so concurrent readers never see a partial file.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << "# pfev-frontier 1\n";
    for (const auto& [k, v] : header) out << "# " << k << ' ' << v << '\n';
    out << "# objectives " << frontier.num_objectives() << '\n';
    out << "# inputs " << (frontier.has_inputs() ? frontier.inputs.cols() : 0) << '\n';
    for (int i = 0; i < frontier.size(); ++i) {
      for (Eigen::Index l = 0; l < frontier.points.cols(); ++l) out << (l ? " " : "") << fmt(frontier.points(i, l));
      if (frontier.has_inputs()) {
        for (Eigen::Index k = 0; k < frontier.inputs.cols(); ++k) out << ' ' << fmt(frontier.inputs(i, k));
      }
      out << '\n';
    }
  }
  std::filesystem::rename(tmp, path);
}

std::optional<FrontierFile> read_frontier(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  FrontierFile file;
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      std::string value;
      std::getline(hs >> std::ws, value);
      file.header[key] = value;
      continue;
    }
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) row.push_back(std::stod(tok));
    rows.push_back(std::move(row));
  }
  if (!file.header.count("objectives") || !file.header.count("inputs")) {
    throw std::runtime_error("malformed frontier file: " + path);
  }
  const int L = std::stoi(file.header["objectives"]);
  const int d = std::stoi(file.header["inputs"]);
  file.frontier.points.resize(static_cast<Eigen::Index>(rows.size()), L);
  if (d > 0) file.frontier.inputs.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != L + d) throw std::runtime_error("malformed frontier row in " + path);
    const auto r = static_cast<Eigen::Index>(i);
    for (int l = 0; l < L; ++l) file.frontier.points(r, l) = rows[i][static_cast<std::size_t>(l)];
    for (int k = 0; k < d; ++k) file.frontier.inputs(r, k) = rows[i][static_cast<std::size_t>(L + k)];
  }
  return file;
}

ParetoSet build(const problems::Problem& problem, const Config& cfg) {
  std::string path;
  if (!cfg.cache_dir.empty()) {
    path = (std::filesystem::path(cfg.cache_dir) / cache_file_name(problem.id, cfg)).string();
    if (auto cached = read_frontier(path)) return std::move(cached->frontier);
  }
  nsga2::Config solver;
  solver.population = cfg.population;
  solver.generations = cfg.generations;
  solver.seed = cfg.seed;
  const nsga2::BatchObjective objective = [&problem](const Matrix& x) { return problem.evaluate_batch(x); };
  ParetoSet frontier = nsga2::solve(objective, problem.domain(), solver);
  if (!path.empty()) {
    write_frontier(path, frontier,
                   {{"problem", problem.id},
                    {"seed", std::to_string(cfg.seed)},
                    {"generations", std::to_string(cfg.generations)},
                    {"population", std::to_string(cfg.population)},
                    {"tool_version", version()}});
    // Return what a later cache hit would return.
    if (auto cached = read_frontier(path)) return std::move(cached->frontier);
  }
  return frontier;
}

}  // namespace reference
}  // namespace pfev
