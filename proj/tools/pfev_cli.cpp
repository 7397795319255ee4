// pfev command line front end.
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "pfev/config.hpp"
#include "pfev/harness.hpp"
#include "pfev/reference_frontier.hpp"
#include "pfev/results_io.hpp"
#include "pfev/studies.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string output_root(const std::string& flag, const std::string& configured) {
  if (!flag.empty()) return flag;
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("PFEV_OUTPUT_ROOT"); env != nullptr && *env != '\0') return env;
  return "pfev-output";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pfev::ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct RunOverrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string strategy;
  std::optional<int> iterations;
  int threads = 1;
};

void apply(pfev::RunConfig& cfg, const RunOverrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (!o.strategy.empty()) cfg.strategy = pfev::parse_strategy(o.strategy);
  if (o.iterations) cfg.iterations = *o.iterations;
  cfg.validate();
}

std::string run_dir(const std::string& root, const pfev::problems::Problem& p, const pfev::RunConfig& cfg) {
  return (fs::path(root) / p.id / pfev::to_string(cfg.strategy) / ("seed-" + std::to_string(cfg.seed))).string();
}

void default_cache(pfev::RunConfig& cfg, const std::string& root) {
  if (cfg.reference.cache_dir.empty()) cfg.reference.cache_dir = (fs::path(root) / "reference-cache").string();
}

int cmd_run(const RunOverrides& o) {
  pfev::RunConfig cfg = o.config.empty() ? pfev::RunConfig{} : pfev::load_run_config(o.config);
  apply(cfg, o);
  const std::string root = output_root(o.out, cfg.output);
  default_cache(cfg, root);
  const pfev::problems::Problem problem = pfev::make_problem(cfg.problem, cfg.seed);
  // With --out the directory is used as given; otherwise runs are nested by problem/strategy/seed.
  const std::string dir = o.out.empty() ? run_dir(root, problem, cfg) : root;
  const pfev::ParetoSet reference = pfev::reference::build(problem, cfg.reference);
  pfev::results::RunWriter writer(dir, cfg);
  const auto history = pfev::harness::run_bo(cfg, problem, reference, std::ref(writer));
  pfev::results::write_summary_csv((fs::path(dir) / "summary.csv").string(), {history});
  std::cout << problem.id << ' ' << pfev::to_string(cfg.strategy) << " seed " << cfg.seed << ": final RHV "
            << history.final_rhv() << " -> " << dir << '\n';
  return 0;
}

int cmd_bench(const RunOverrides& o, const std::string& strategies_flag, int num_seeds) {
  pfev::RunConfig base;
  std::vector<pfev::ProblemSpec> problems;
  std::vector<std::string> strategies;
  std::vector<std::uint64_t> seeds;
  if (!o.config.empty()) {
    json j;
    try {
      j = json::parse(read_file(o.config));
    } catch (const json::parse_error& e) {
      throw pfev::ConfigError(std::string("bench config is not valid JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
      if (key != "run" && key != "problems" && key != "strategies" && key != "seeds") {
        throw pfev::ConfigError("bench config: unknown key '" + key + "'");
      }
    }
    if (j.contains("run")) base = pfev::parse_run_config(j.at("run").dump());
    if (j.contains("problems")) {
      for (const auto& p : j.at("problems")) {
        pfev::RunConfig tmp = pfev::parse_run_config(json{{"problem", p}}.dump());
        problems.push_back(tmp.problem);
      }
    }
    if (j.contains("strategies")) strategies = j.at("strategies").get<std::vector<std::string>>();
    if (j.contains("seeds")) seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  }
  if (problems.empty()) problems.push_back(base.problem);
  if (!strategies_flag.empty()) strategies = split(strategies_flag, ',');
  if (!o.strategy.empty()) strategies = {o.strategy};
  if (strategies.empty()) strategies = {"pfev-map", "random"};
  if (num_seeds > 0 || seeds.empty()) {
    seeds.clear();
    const std::uint64_t first = o.seed.value_or(0);
    for (int s = 0; s < std::max(num_seeds, 1); ++s) seeds.push_back(first + static_cast<std::uint64_t>(s));
  }
  if (o.iterations) base.iterations = *o.iterations;
  for (const auto& s : strategies) pfev::parse_strategy(s);
  const std::string root = output_root(o.out, base.output);
  default_cache(base, root);

  struct Job {
    pfev::RunConfig cfg;
    std::size_t problem;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < problems.size(); ++p) {
    for (const auto& s : strategies) {
      for (auto seed : seeds) {
        pfev::RunConfig cfg = base;
        cfg.problem = problems[p];
        cfg.strategy = pfev::parse_strategy(s);
        cfg.seed = seed;
        cfg.validate();
        jobs.push_back({cfg, p});
      }
    }
  }

  std::vector<pfev::harness::RunHistory> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::vector<int> error_codes(jobs.size(), 0);
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& cfg = jobs[i].cfg;
      try {
        const auto problem = pfev::make_problem(cfg.problem, cfg.seed);
        pfev::ParetoSet reference;
        {
          // Reference runs are shared through the cache; build them one at a time.
          static std::mutex ref_mutex;
          std::lock_guard<std::mutex> lock(ref_mutex);
          reference = pfev::reference::build(problem, cfg.reference);
        }
        pfev::results::RunWriter writer(run_dir(root, problem, cfg), cfg);
        results[i] = pfev::harness::run_bo(cfg, problem, reference, std::ref(writer));
        std::lock_guard<std::mutex> lock(io);
        std::cout << problem.id << ' ' << pfev::to_string(cfg.strategy) << " seed " << cfg.seed << ": final RHV "
                  << results[i].final_rhv() << '\n';
      } catch (const pfev::NumericalError& e) {
        errors[i] = e.what();
        error_codes[i] = kExitNumerical;
      } catch (const std::exception& e) {
        errors[i] = e.what();
        error_codes[i] = 1;
      }
    }
  };
  const int threads = std::max(1, o.threads);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = 0;
  std::vector<pfev::harness::RunHistory> finished;
  std::map<std::string, std::vector<pfev::harness::RunHistory>> groups;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (error_codes[i] != 0) {
      std::cerr << "run " << i << " failed: " << errors[i] << '\n';
      code = std::max(code, error_codes[i]);
      continue;
    }
    finished.push_back(results[i]);
    groups[results[i].problem_id.substr(0, results[i].problem_id.find("-s")) + "_" + results[i].strategy].push_back(
        results[i]);
  }
  pfev::results::write_summary_csv((fs::path(root) / "summary.csv").string(), finished);
  for (const auto& [label, runs] : groups) {
    pfev::results::write_series_csv((fs::path(root) / ("series_" + label + ".csv")).string(), label,
                                    pfev::results::rhv_series(runs));
  }
  std::cout << "wrote " << finished.size() << " runs under " << root << '\n';
  return code;
}

int cmd_gap(const std::vector<int>& Ls, const std::vector<int>& sizes, int num_seeds, std::uint64_t seed,
            const std::string& out) {
  std::vector<std::uint64_t> seeds;
  for (int s = 0; s < num_seeds; ++s) seeds.push_back(seed + static_cast<std::uint64_t>(s));
  std::vector<pfev::studies::GapRow> rows;
  for (int L : Ls) {
    const auto part = pfev::studies::gap_study(L, sizes, seeds);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const std::string root = output_root(out, "");
  pfev::results::write_gap_table((fs::path(root) / "gap_study.jsonl").string(),
                                 (fs::path(root) / "gap_study.csv").string(), rows);
  std::cout << "L size mean_over_ratio mean_under_ratio\n";
  for (int L : Ls) {
    for (int n : sizes) {
      double o = 0.0, u = 0.0;
      int c = 0;
      for (const auto& r : rows) {
        if (r.L == L && r.size == n) o += r.over_ratio, u += r.under_ratio, ++c;
      }
      std::cout << L << ' ' << n << ' ' << o / c << ' ' << u / c << '\n';
    }
  }
  return 0;
}

int cmd_estimator(const pfev::studies::EstimatorStudyConfig& cfg, const std::string& out) {
  const auto rows = pfev::studies::estimator_study(cfg);
  const std::string root = output_root(out, "");
  pfev::results::write_estimator_table((fs::path(root) / "estimator_study.jsonl").string(),
                                       (fs::path(root) / "estimator_study.csv").string(), rows);
  std::cout << "estimator K r mse_mean mse_sd\n";
  for (const auto& r : rows) std::cout << r.estimator << ' ' << r.K << ' ' << r.r << ' ' << r.mse_mean << ' ' << r.mse_sd << '\n';
  return 0;
}

int cmd_reference(const RunOverrides& o, int generations, int population) {
  pfev::RunConfig cfg = o.config.empty() ? pfev::RunConfig{} : pfev::load_run_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (generations > 0) cfg.reference.generations = generations;
  if (population > 0) cfg.reference.population = population;
  const std::string root = output_root(o.out, cfg.output);
  default_cache(cfg, root);
  cfg.validate();
  const auto problem = pfev::make_problem(cfg.problem, cfg.seed);
  const auto frontier = pfev::reference::build(problem, cfg.reference);
  const auto ref = pfev::harness::rhv_reference_point(frontier);
  std::cout << problem.id << ": " << frontier.size() << " points, cached in "
            << (fs::path(cfg.reference.cache_dir) / pfev::reference::cache_file_name(problem.id, cfg.reference)).string()
            << "\n";
  (void)ref;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pfev: multi-objective Bayesian optimization with variational lower bounds"};
  app.require_subcommand(1);

  RunOverrides o;
  std::uint64_t seed_value = 0;
  int iterations_value = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed_value, "Master seed");
    sub->add_option("--out", o.out, "Output directory (default: $PFEV_OUTPUT_ROOT or ./pfev-output)");
    sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto* run = app.add_subcommand("run", "Run one optimization");
  add_common(run);
  run->add_option("--strategy", o.strategy, "pfev-map | pfev-mc | pfev-lambda1 | pfev-lambda-min | parego | random");
  run->add_option("--iterations", iterations_value, "Number of iterations")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "Run problems x strategies x seeds");
  add_common(bench);
  std::string strategies;
  int bench_seeds = 0;
  bench->add_option("--strategy", o.strategy, "Single strategy");
  bench->add_option("--strategies", strategies, "Comma separated strategies");
  bench->add_option("--seeds", bench_seeds, "Number of consecutive seeds starting at --seed");
  bench->add_option("--iterations", iterations_value, "Number of iterations")->check(CLI::PositiveNumber);

  auto* gap = app.add_subcommand("gap-study", "Over/under truncation volume study");
  std::vector<int> gap_L{2, 3};
  std::vector<int> gap_sizes{10, 30, 100, 300, 1000};
  int gap_seeds = 10;
  gap->add_option("--L", gap_L, "Objective counts")->delimiter(',');
  gap->add_option("--sizes", gap_sizes, "Frontier sizes")->delimiter(',');
  gap->add_option("--seeds", gap_seeds, "Number of seeds")->check(CLI::PositiveNumber);
  gap->add_option("--seed", seed_value, "First seed");
  gap->add_option("--out", o.out, "Output directory");
  gap->add_option("--threads", o.threads, "Unused; accepted for symmetry");

  auto* est = app.add_subcommand("estimator-study", "Accuracy of the lower-bound estimators");
  pfev::studies::EstimatorStudyConfig est_cfg;
  est->add_option("--seeds", est_cfg.num_seeds, "Number of seeds")->check(CLI::PositiveNumber);
  est->add_option("--seed", est_cfg.base_seed, "Base seed");
  est->add_option("--ground-truth", est_cfg.ground_truth_samples, "Samples for the reference estimate");
  est->add_option("--sizes", est_cfg.sample_sizes, "Sample sizes K")->delimiter(',');
  est->add_option("--out", o.out, "Output directory");
  est->add_option("--threads", o.threads, "Unused; accepted for symmetry");

  auto* ref = app.add_subcommand("ref-frontier", "Build and cache a reference frontier");
  add_common(ref);
  int ref_generations = 0;
  int ref_population = 0;
  ref->add_option("--generations", ref_generations, "NSGA-II generations");
  ref->add_option("--population", ref_population, "NSGA-II population");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  auto count = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };
  try {
    if (*run || *bench || *ref) {
      CLI::App* sub = *run ? run : (*bench ? bench : ref);
      if (count(sub, "--seed")) o.seed = seed_value;
    }
    if ((*run && count(run, "--iterations")) || (*bench && count(bench, "--iterations"))) o.iterations = iterations_value;
    if (*run) return cmd_run(o);
    if (*bench) return cmd_bench(o, strategies, bench_seeds);
    if (*gap) return cmd_gap(gap_L, gap_sizes, gap_seeds, seed_value, o.out);
    if (*est) return cmd_estimator(est_cfg, o.out);
    if (*ref) return cmd_reference(o, ref_generations, ref_population);
  } catch (const pfev::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const pfev::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
