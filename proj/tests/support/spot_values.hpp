#pragma once
// Benchmark formulas written out term by term for fixed dimensions, used as
// spot-value oracles.

#include <cmath>
#include <numbers>

#include <Eigen/Core>

namespace spot {

using Vector = Eigen::VectorXd;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline constexpr double kPi = std::numbers::pi;

inline Vector fonseca2(double a, double b) {
  const double c = std::pow(2.0, -0.5);
  return vec({1 - std::exp(-(std::pow(a - c, 2) + std::pow(b - c, 2))),
              1 - std::exp(-(std::pow(a + c, 2) + std::pow(b + c, 2)))});
}

inline Vector kursawe3(double a, double b, double c) {
  const double f1 = -10 * std::exp(-0.2 * std::hypot(a, b)) - 10 * std::exp(-0.2 * std::hypot(b, c));
  auto g = [](double t) { return std::pow(std::fabs(t), 0.8) + 5 * std::sin(std::pow(t, 3)); };
  return vec({f1, g(a) + g(b) + g(c)});
}

inline Vector viennet2(double x, double y) {
  const double r = std::pow(x, 2) + std::pow(y, 2);
  return vec({r / 2 + std::sin(r), std::pow(3 * x - 2 * y + 4, 2) / 8 + std::pow(x - y + 1, 2) / 27 + 15,
              1 / (r + 1) - 1.1 * std::exp(-r)});
}

inline Vector fes1_3(const Vector& x) {
  double f1 = 0, f2 = 0;
  for (int i = 1; i <= 3; ++i) {
    f1 += std::pow(std::fabs(x[i - 1] - std::exp(std::pow(i / 3.0, 2) / 3)), 0.5);
    f2 += std::pow(x[i - 1] - 0.5 * std::cos(10 * kPi * i / 3.0) - 0.5, 2);
  }
  return vec({f1, f2});
}

inline Vector fes2_3(const Vector& x) {
  double f1 = 0, f2 = 0, f3 = 0;
  for (int i = 1; i <= 3; ++i) {
    f1 += std::pow(x[i - 1] - 0.5 * std::cos(10 * kPi * i / 3.0) - 0.5, 2);
    f2 += std::pow(std::fabs(x[i - 1] - std::pow(std::sin(i - 1.0), 2) * std::pow(std::cos(i - 1.0), 2)), 0.5);
    f3 += std::pow(std::fabs(x[i - 1] - 0.25 * std::cos(i - 1.0) * std::cos(2.0 * i - 2) - 0.5), 0.5);
  }
  return vec({f1, f2, f3});
}

// Listed with leading minus signs, i.e. already in the maximized orientation.
inline Vector fes3_3_listed(const Vector& x) {
  double f1 = 0, f2 = 0, f3 = 0, f4 = 0;
  for (int i = 1; i <= 3; ++i) {
    f1 -= std::pow(std::fabs(x[i - 1] - std::exp(std::pow(i / 3.0, 2)) / 3), 0.5);
    f2 -= std::pow(std::fabs(x[i - 1] - std::pow(std::sin(i - 1.0), 2) * std::pow(std::cos(i - 1.0), 2)), 0.5);
    f3 -= std::pow(std::fabs(x[i - 1] - (0.25 * std::cos(i - 1.0) * std::cos(2.0 * i - 1) - 0.5)), 0.5);
    f4 -= std::pow(x[i - 1] - 0.5 * std::sin(1000 * kPi * i / 3.0) - 0.5, 2);
  }
  return vec({f1, f2, f3, f4});
}

}  // namespace spot
