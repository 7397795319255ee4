#include "pfev/results_io.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace pfev::results {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const json& j, Eigen::Index cols) {
  Matrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(i), c) = j[i][static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json doubles_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(std::isnan(x) ? json(nullptr) : json(x));
  return a;
}

std::vector<double> doubles_from(const json& j) {
  std::vector<double> v;
  for (const auto& e : j) v.push_back(e.is_null() ? kNaN : e.get<double>());
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

RunWriter::RunWriter(const std::string& dir, const RunConfig& cfg) {
  RunConfig recorded = cfg;
  // Paths do not influence results; keep them out so histories compare equal.
  recorded.output.clear();
  recorded.reference.cache_dir.clear();
  config_json_ = to_json(recorded);
  std::filesystem::create_directories(dir);
  history_ = open_out((std::filesystem::path(dir) / kHistoryFile).string());
  timings_ = open_out((std::filesystem::path(dir) / kTimingsFile).string());
}

void RunWriter::operator()(const harness::RunHistory& h, const harness::IterationRecord* rec) {
  if (rec == nullptr) {
    json header = {{"type", "header"},
                   {"schema_version", kSchemaVersion},
                   {"tool", "pfev"},
                   {"tool_version", version()},
                   {"problem", h.problem_id},
                   {"strategy", h.strategy},
                   {"seed", h.seed},
                   {"reference_point", doubles_json(std::vector<double>(h.reference_point.data(), h.reference_point.data() + h.reference_point.size()))},
                   {"reference_hypervolume", h.reference_hypervolume},
                   {"reference_size", h.reference_size},
                   {"config", json::parse(config_json_)}};
    history_ << header.dump() << '\n';
    json initial = {{"type", "initial"},
                    {"x", matrix_json(h.initial_x)},
                    {"y", matrix_json(h.initial_y)},
                    {"f", matrix_json(h.initial_f)},
                    {"hypervolume", h.initial_hypervolume},
                    {"rhv", h.initial_rhv}};
    history_ << initial.dump() << '\n';
    history_.flush();
    timings_ << "# schema_version " << kSchemaVersion << '\n'
             << "iteration,fit,paths,solver,decomposition,acquisition,evaluation,total\n";
    timings_.flush();
    return;
  }
  json line = {{"type", "iteration"},
               {"iteration", rec->iteration},
               {"x", matrix_json(rec->x)},
               {"y", matrix_json(rec->y)},
               {"f", matrix_json(rec->f)},
               {"lambda", doubles_json(rec->lambda)},
               {"acquisition", doubles_json(rec->acquisition)},
               {"hypervolume", rec->hypervolume},
               {"rhv", rec->rhv}};
  history_ << line.dump() << '\n';
  history_.flush();
  const auto& t = rec->timings;
  timings_ << rec->iteration << ',' << fmt(t.fit) << ',' << fmt(t.paths) << ',' << fmt(t.solver) << ','
           << fmt(t.decomposition) << ',' << fmt(t.acquisition) << ',' << fmt(t.evaluation) << ',' << fmt(t.total)
           << '\n';
  timings_.flush();
}

void write_run(const std::string& dir, const RunConfig& cfg, const harness::RunHistory& history) {
  RunWriter writer(dir, cfg);
  writer(history, nullptr);
  for (const auto& rec : history.iterations) writer(history, &rec);
}

harness::RunHistory read_run(const std::string& dir) {
  const std::string path = (std::filesystem::path(dir) / kHistoryFile).string();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  harness::RunHistory h;
  std::string line;
  Eigen::Index d = 0;
  Eigen::Index L = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const std::string type = j.at("type").get<std::string>();
    if (type == "header") {
      if (j.at("schema_version").get<int>() != kSchemaVersion) throw std::runtime_error("unsupported schema version");
      seen_header = true;
      h.problem_id = j.at("problem").get<std::string>();
      h.strategy = j.at("strategy").get<std::string>();
      h.seed = j.at("seed").get<std::uint64_t>();
      const auto ref = doubles_from(j.at("reference_point"));
      h.reference_point = Eigen::Map<const Vector>(ref.data(), static_cast<Eigen::Index>(ref.size()));
      h.reference_hypervolume = j.at("reference_hypervolume").get<double>();
      h.reference_size = j.at("reference_size").get<int>();
      L = h.reference_point.size();
    } else if (type == "initial") {
      if (!seen_header) throw std::runtime_error("history without header: " + path);
      d = j.at("x").empty() ? 0 : static_cast<Eigen::Index>(j.at("x")[0].size());
      h.initial_x = matrix_from(j.at("x"), d);
      h.initial_y = matrix_from(j.at("y"), L);
      h.initial_f = matrix_from(j.at("f"), L);
      h.initial_hypervolume = j.at("hypervolume").get<double>();
      h.initial_rhv = j.at("rhv").get<double>();
    } else if (type == "iteration") {
      harness::IterationRecord r;
      r.iteration = j.at("iteration").get<int>();
      r.x = matrix_from(j.at("x"), d);
      r.y = matrix_from(j.at("y"), L);
      r.f = matrix_from(j.at("f"), L);
      r.lambda = doubles_from(j.at("lambda"));
      r.acquisition = doubles_from(j.at("acquisition"));
      r.hypervolume = j.at("hypervolume").get<double>();
      r.rhv = j.at("rhv").get<double>();
      h.iterations.push_back(std::move(r));
    } else {
      throw std::runtime_error("unknown record type '" + type + "' in " + path);
    }
  }

  std::ifstream tin((std::filesystem::path(dir) / kTimingsFile).string());
  std::size_t next = 0;
  while (tin && std::getline(tin, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("iteration", 0) == 0) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != 8 || next >= h.iterations.size()) throw std::runtime_error("malformed timings file in " + dir);
    auto& t = h.iterations[next++].timings;
    t = {v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
  }
  return h;
}

void write_summary_csv(const std::string& path, const std::vector<harness::RunHistory>& runs) {
  std::ofstream out = open_out(path);
  out << "# schema_version " << kSchemaVersion << '\n';
  out << "problem,strategy,seed,observations,final_hypervolume,final_rhv\n";
  for (const auto& h : runs) {
    const double hv = h.iterations.empty() ? h.initial_hypervolume : h.iterations.back().hypervolume;
    out << h.problem_id << ',' << h.strategy << ',' << h.seed << ',' << h.num_observations() << ',' << fmt(hv) << ','
        << fmt(h.final_rhv()) << '\n';
  }
}

std::vector<SeriesPoint> rhv_series(const std::vector<harness::RunHistory>& runs) {
  std::vector<SeriesPoint> series;
  if (runs.empty()) return series;
  const std::size_t T = runs.front().iterations.size();
  for (const auto& h : runs) require(h.iterations.size() == T, "rhv_series: runs differ in length");
  for (std::size_t t = 0; t <= T; ++t) {
    SeriesPoint p;
    p.iteration = static_cast<int>(t);
    p.count = static_cast<int>(runs.size());
    std::vector<double> v;
    for (const auto& h : runs) v.push_back(t == 0 ? h.initial_rhv : h.iterations[t - 1].rhv);
    for (double x : v) p.mean += x;
    p.mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - p.mean) * (x - p.mean);
    p.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    series.push_back(p);
  }
  return series;
}

void write_series_csv(const std::string& path, const std::string& label, const std::vector<SeriesPoint>& series) {
  std::ofstream out = open_out(path);
  out << "# schema_version " << kSchemaVersion << '\n';
  out << "label,iteration,rhv_mean,rhv_sd,runs\n";
  for (const auto& p : series) {
    out << label << ',' << p.iteration << ',' << fmt(p.mean) << ',' << fmt(p.sd) << ',' << p.count << '\n';
  }
}

void write_gap_table(const std::string& jsonl_path, const std::string& csv_path,
                     const std::vector<studies::GapRow>& rows) {
  std::ofstream jl = open_out(jsonl_path);
  std::ofstream csv = open_out(csv_path);
  jl << json{{"type", "header"}, {"schema_version", kSchemaVersion}, {"table", "gap-study"}}.dump() << '\n';
  csv << "# schema_version " << kSchemaVersion << '\n';
  csv << "L,size,seed,over_volume,under_volume,true_volume,over_ratio,under_ratio\n";
  for (const auto& r : rows) {
    jl << json{{"L", r.L},
               {"size", r.size},
               {"seed", r.seed},
               {"over_volume", r.over_volume},
               {"under_volume", r.under_volume},
               {"true_volume", r.true_volume},
               {"over_ratio", r.over_ratio},
               {"under_ratio", r.under_ratio}}
              .dump()
       << '\n';
    csv << r.L << ',' << r.size << ',' << r.seed << ',' << fmt(r.over_volume) << ',' << fmt(r.under_volume) << ','
        << fmt(r.true_volume) << ',' << fmt(r.over_ratio) << ',' << fmt(r.under_ratio) << '\n';
  }
}

void write_estimator_table(const std::string& jsonl_path, const std::string& csv_path,
                           const std::vector<studies::EstimatorRow>& rows) {
  std::ofstream jl = open_out(jsonl_path);
  std::ofstream csv = open_out(csv_path);
  jl << json{{"type", "header"}, {"schema_version", kSchemaVersion}, {"table", "estimator-study"}}.dump() << '\n';
  csv << "# schema_version " << kSchemaVersion << '\n';
  csv << "estimator,K,r,mse_mean,mse_sd,seeds\n";
  for (const auto& r : rows) {
    jl << json{{"estimator", r.estimator}, {"K", r.K},           {"r", r.r},
               {"mse_mean", r.mse_mean},   {"mse_sd", r.mse_sd}, {"seeds", r.seeds}}
              .dump()
       << '\n';
    csv << r.estimator << ',' << r.K << ',' << fmt(r.r) << ',' << fmt(r.mse_mean) << ',' << fmt(r.mse_sd) << ','
        << r.seeds << '\n';
  }
}

}  // namespace pfev::results
