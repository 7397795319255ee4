#pragma once
// Small sample sets on a synthetic two-objective problem.

#include <random>

#include "pfev/acquisition.hpp"
#include "pfev/gp.hpp"
#include "pfev/problems.hpp"

namespace fixtures {

using pfev::Box;
using pfev::Vector;

struct Fixture {
  Box domain = Box::unit(2);
  pfev::gp::IndependentGps gps;
  pfev::acquisition::SampleSet samples;

  explicit Fixture(std::uint64_t seed, int K = 10) {
    const pfev::problems::Problem problem = pfev::problems::make_synthetic_gp(2, 2, 0.2, seed, 300);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    pfev::gp::Dataset data(2, 2);
    for (int i = 0; i < 8; ++i) {
      Vector x(2);
      x << u(rng), u(rng);
      data.append(x, problem.evaluate(x));
    }
    gps = pfev::gp::fit(data, domain);
    pfev::acquisition::SampleConfig cfg;
    cfg.num_samples = K;
    cfg.num_features = 200;
    cfg.nsga2 = pfev::nsga2::Config{20, 60};
    cfg.seed = seed + 100;
    samples = pfev::acquisition::prepare_samples(gps, domain, cfg);
  }

  Vector random_point(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector x(2);
    x << u(rng), u(rng);
    return x;
  }
};

}  // namespace fixtures
