#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "pfev/direct.hpp"

using namespace pfev;

namespace {

direct::Config budget(int evals) {
  direct::Config c;
  c.max_evaluations = evals;
  return c;
}

// Negated Branin, rescaled to the unit square.
double bowl(const Vector& u) {
  const double x = 15.0 * u[0] - 5.0;
  const double y = 15.0 * u[1];
  const double pi = std::numbers::pi;
  const double b = 5.1 / (4 * pi * pi);
  const double c = 5.0 / pi;
  const double t = 1.0 / (8 * pi);
  return -(std::pow(y - b * x * x + c * x - 6.0, 2) + 10.0 * (1 - t) * std::cos(x) + 10.0);
}

}  // namespace

TEST(Direct, OneDimensionalParabola) {
  const auto r = direct::maximize([](const Vector& x) { return -(x[0] - 0.5) * (x[0] - 0.5); }, Box::unit(1),
                                  budget(500));
  EXPECT_NEAR(r.x[0], 0.5, 1e-2);
  EXPECT_LE(r.evaluations, 500);
}

TEST(Direct, ConstantReturnsFirstCenter) {
  const auto r = direct::maximize([](const Vector&) { return 3.25; }, Box::unit(3), budget(100));
  EXPECT_EQ(r.value, 3.25);
  EXPECT_EQ(r.x, Vector::Constant(3, 0.5));
}

TEST(Direct, BraninAgainstGrid) {
  double grid_best = -kInf;
  Vector u(2);
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j < 200; ++j) {
      u << i / 199.0, j / 199.0;
      grid_best = std::max(grid_best, bowl(u));
    }
  const auto r = direct::maximize(bowl, Box::unit(2), budget(2000));
  EXPECT_NEAR(r.value, grid_best, 1e-2);
  EXPECT_NEAR(r.value, bowl(r.x), 0.0);
}

TEST(Direct, MonotoneInBudget) {
  double previous = -kInf;
  for (int evals : {20, 50, 100, 200, 400, 800}) {
    const double v = direct::maximize(bowl, Box::unit(2), budget(evals)).value;
    EXPECT_GE(v, previous);
    previous = v;
  }
}

TEST(Direct, CentersInsideAndDistinct) {
  std::set<std::pair<double, double>> seen;
  int repeats = 0;
  bool outside = false;
  const Box box{Vector::Constant(2, -1.0), Vector::Constant(2, 2.0)};
  const auto f = [&](const Vector& x) {
    repeats += !seen.insert({x[0], x[1]}).second;
    outside = outside || !box.contains(x);
    return bowl((x.array() + 1.0).matrix() / 3.0);
  };
  const auto r = direct::maximize(f, box, budget(1000));
  EXPECT_EQ(repeats, 0);
  EXPECT_FALSE(outside);
  EXPECT_EQ(static_cast<int>(seen.size()), r.evaluations);
}

TEST(Direct, ConfigValidation) {
  direct::Config c;
  c.max_evaluations = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = direct::Config{};
  c.epsilon = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(direct::Config::for_dimension(3).max_evaluations, 800);
}
