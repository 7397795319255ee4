#include "pfev/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pfev {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

ProblemSpec parse_problem(const json& j, const std::string& where) {
  check_keys(j, {"kind", "name", "d", "L", "length_scale", "seed", "num_features", "parts"}, where);
  ProblemSpec p;
  read(j, "kind", p.kind, where);
  read(j, "name", p.name, where);
  read(j, "d", p.d, where);
  read(j, "L", p.L, where);
  read(j, "length_scale", p.length_scale, where);
  read(j, "num_features", p.num_features, where);
  if (j.contains("seed") && !j.at("seed").is_null()) {
    std::uint64_t s = 0;
    read(j, "seed", s, where);
    p.seed = s;
  }
  if (j.contains("parts")) {
    if (!j.at("parts").is_array()) throw ConfigError(where + ".parts: expected an array");
    for (std::size_t i = 0; i < j.at("parts").size(); ++i) {
      p.parts.push_back(parse_problem(j.at("parts")[i], where + ".parts[" + std::to_string(i) + "]"));
    }
  }
  return p;
}

json problem_json(const ProblemSpec& p) {
  json j = {{"kind", p.kind},         {"name", p.name},
            {"d", p.d},               {"L", p.L},
            {"length_scale", p.length_scale}, {"num_features", p.num_features}};
  j["seed"] = p.seed ? json(*p.seed) : json(nullptr);
  j["parts"] = json::array();
  for (const auto& part : p.parts) j["parts"].push_back(problem_json(part));
  return j;
}

}  // namespace

problems::Problem make_problem(const ProblemSpec& spec, std::uint64_t run_seed) {
  try {
    if (spec.kind == "synthetic") {
      return problems::make_synthetic_gp(spec.d, spec.L, spec.length_scale, spec.seed.value_or(run_seed),
                                         spec.num_features);
    }
    if (spec.kind == "named") return problems::make_named(spec.name, spec.d);
    if (spec.kind == "combined") {
      if (spec.parts.size() < 2) throw ConfigError("combined problem needs at least two parts");
      problems::Problem p = make_problem(spec.parts[0], run_seed);
      for (std::size_t i = 1; i < spec.parts.size(); ++i) p = problems::make_combined(p, make_problem(spec.parts[i], run_seed));
      return p;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown problem kind: " + spec.kind);
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kPfevMap: return "pfev-map";
    case Strategy::kPfevMc: return "pfev-mc";
    case Strategy::kPfevLambda1: return "pfev-lambda1";
    case Strategy::kPfevLambdaMin: return "pfev-lambda-min";
    case Strategy::kParego: return "parego";
    case Strategy::kRandom: return "random";
  }
  return "unknown";
}

Strategy parse_strategy(const std::string& name) {
  for (Strategy s : {Strategy::kPfevMap, Strategy::kPfevMc, Strategy::kPfevLambda1, Strategy::kPfevLambdaMin,
                     Strategy::kParego, Strategy::kRandom}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown strategy: " + name);
}

bool is_pfev(Strategy s) { return s != Strategy::kParego && s != Strategy::kRandom; }

void RunConfig::validate() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  check(iterations >= 1, "iterations must be >= 1");
  check(initial_points >= 1, "initial_points must be >= 1");
  check(num_samples >= 1, "num_samples must be >= 1");
  check(num_features >= 1, "num_features must be >= 1");
  check(batch_size >= 1, "batch_size must be >= 1");
  check(!noise.enabled || (noise.stddev > 0.0 && noise.draws >= 1), "noise needs stddev > 0 and draws >= 1");
  check(!noise.enabled || batch_size == 1, "noisy observations are supported with batch_size 1 only");
  check(map_r >= 0.0, "map_r must be non-negative");
  check(parego_rho >= 0.0, "parego_rho must be non-negative");
  check(!lambda.grid.empty(), "lambda grid must be non-empty");
  for (double l : lambda.grid) check(l > 0.0 && l <= 1.0, "lambda grid values must lie in (0, 1]");
  check(reference.generations >= 1 && reference.population >= 4 && reference.population % 2 == 0,
        "reference run needs generations >= 1 and an even population >= 4");
  check(direct.max_evaluations >= 0 && direct.max_iterations >= 1 && direct.epsilon >= 0.0, "bad direct settings");
  try {
    nsga2.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const std::string w = "config";
  check_keys(j,
             {"problem", "strategy", "iterations", "initial_points", "num_samples", "num_features", "nsga2", "direct",
              "batch_size", "force_cmi", "noise", "fit", "normalize_outputs", "lambda", "map_r", "parego_rho",
              "reference", "seed", "output"},
             w);
  RunConfig c;
  if (j.contains("problem")) c.problem = parse_problem(j.at("problem"), w + ".problem");
  if (j.contains("strategy")) {
    std::string s;
    read(j, "strategy", s, w);
    c.strategy = parse_strategy(s);
  }
  read(j, "iterations", c.iterations, w);
  read(j, "initial_points", c.initial_points, w);
  read(j, "num_samples", c.num_samples, w);
  read(j, "num_features", c.num_features, w);
  read(j, "batch_size", c.batch_size, w);
  read(j, "force_cmi", c.force_cmi, w);
  read(j, "normalize_outputs", c.normalize_outputs, w);
  read(j, "map_r", c.map_r, w);
  read(j, "parego_rho", c.parego_rho, w);
  read(j, "seed", c.seed, w);
  read(j, "output", c.output, w);
  if (j.contains("nsga2")) {
    const json& n = j.at("nsga2");
    const std::string nw = w + ".nsga2";
    check_keys(n, {"population", "generations", "crossover_prob", "crossover_eta", "mutation_prob", "mutation_eta"},
               nw);
    read(n, "population", c.nsga2.population, nw);
    read(n, "generations", c.nsga2.generations, nw);
    read(n, "crossover_prob", c.nsga2.crossover_prob, nw);
    read(n, "crossover_eta", c.nsga2.crossover_eta, nw);
    read(n, "mutation_prob", c.nsga2.mutation_prob, nw);
    read(n, "mutation_eta", c.nsga2.mutation_eta, nw);
  }
  if (j.contains("direct")) {
    const json& n = j.at("direct");
    const std::string nw = w + ".direct";
    check_keys(n, {"max_evaluations", "max_iterations", "epsilon"}, nw);
    read(n, "max_evaluations", c.direct.max_evaluations, nw);
    read(n, "max_iterations", c.direct.max_iterations, nw);
    read(n, "epsilon", c.direct.epsilon, nw);
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    const std::string nw = w + ".noise";
    check_keys(n, {"enabled", "stddev", "draws"}, nw);
    read(n, "enabled", c.noise.enabled, nw);
    read(n, "stddev", c.noise.stddev, nw);
    read(n, "draws", c.noise.draws, nw);
  }
  if (j.contains("fit")) {
    const json& n = j.at("fit");
    const std::string nw = w + ".fit";
    check_keys(n, {"noise_variance", "signal_variance", "min_length_scale", "max_length_scale", "grid_points",
                   "golden_iterations"},
               nw);
    read(n, "noise_variance", c.fit.noise_variance, nw);
    read(n, "signal_variance", c.fit.signal_variance, nw);
    read(n, "min_length_scale", c.fit.min_length_scale, nw);
    read(n, "max_length_scale", c.fit.max_length_scale, nw);
    read(n, "grid_points", c.fit.grid_points, nw);
    read(n, "golden_iterations", c.fit.golden_iterations, nw);
  }
  if (j.contains("lambda")) {
    const json& n = j.at("lambda");
    const std::string nw = w + ".lambda";
    check_keys(n, {"grid", "refine", "refine_iterations"}, nw);
    read(n, "grid", c.lambda.grid, nw);
    read(n, "refine", c.lambda.refine, nw);
    read(n, "refine_iterations", c.lambda.refine_iterations, nw);
  }
  if (j.contains("reference")) {
    const json& n = j.at("reference");
    const std::string nw = w + ".reference";
    check_keys(n, {"generations", "population", "seed", "cache_dir"}, nw);
    read(n, "generations", c.reference.generations, nw);
    read(n, "population", c.reference.population, nw);
    read(n, "seed", c.reference.seed, nw);
    read(n, "cache_dir", c.reference.cache_dir, nw);
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string to_json(const RunConfig& c) {
  json j;
  j["problem"] = problem_json(c.problem);
  j["strategy"] = to_string(c.strategy);
  j["iterations"] = c.iterations;
  j["initial_points"] = c.initial_points;
  j["num_samples"] = c.num_samples;
  j["num_features"] = c.num_features;
  j["nsga2"] = {{"population", c.nsga2.population},         {"generations", c.nsga2.generations},
                {"crossover_prob", c.nsga2.crossover_prob}, {"crossover_eta", c.nsga2.crossover_eta},
                {"mutation_prob", c.nsga2.mutation_prob},   {"mutation_eta", c.nsga2.mutation_eta}};
  j["direct"] = {{"max_evaluations", c.direct.max_evaluations},
                 {"max_iterations", c.direct.max_iterations},
                 {"epsilon", c.direct.epsilon}};
  j["batch_size"] = c.batch_size;
  j["force_cmi"] = c.force_cmi;
  j["noise"] = {{"enabled", c.noise.enabled}, {"stddev", c.noise.stddev}, {"draws", c.noise.draws}};
  j["fit"] = {{"noise_variance", c.fit.noise_variance},     {"signal_variance", c.fit.signal_variance},
              {"min_length_scale", c.fit.min_length_scale}, {"max_length_scale", c.fit.max_length_scale},
              {"grid_points", c.fit.grid_points},           {"golden_iterations", c.fit.golden_iterations}};
  j["normalize_outputs"] = c.normalize_outputs;
  j["lambda"] = {{"grid", c.lambda.grid}, {"refine", c.lambda.refine}, {"refine_iterations", c.lambda.refine_iterations}};
  j["map_r"] = c.map_r;
  j["parego_rho"] = c.parego_rho;
  j["reference"] = {{"generations", c.reference.generations},
                    {"population", c.reference.population},
                    {"seed", c.reference.seed},
                    {"cache_dir", c.reference.cache_dir}};
  j["seed"] = c.seed;
  j["output"] = c.output;
  return j.dump(2);
}

}  // namespace pfev
