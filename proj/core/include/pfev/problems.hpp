#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "pfev/common.hpp"

namespace pfev::problems {

/// Black-box test problem on the unit box, maximized.
struct Problem {
  std::string id;
  int d = 0;
  int L = 0;
  std::function<Vector(const Vector&)> objective;  // unit-box coordinates
  std::function<Matrix(const Matrix&)> batch;      // optional faster batch path
  std::map<std::string, std::string> metadata;

  // Named benchmarks only: original formulation on its own box.
  Box raw_domain;
  std::function<Vector(const Vector&)> raw;

  Box domain() const { return Box::unit(d); }
  /// Throws std::invalid_argument on dimension mismatch.
  Vector evaluate(const Vector& x) const;
  Matrix evaluate_batch(const Matrix& x) const;
  /// Affine map from the unit box to the raw domain.
  Vector to_raw(const Vector& unit) const;
};

/// Independent prior random-feature sample per objective on [0, 1]^d.
Problem make_synthetic_gp(int d, int L, double length_scale, std::uint64_t seed, int num_features = 1000);

/// fonseca, kursawe, viennet, fes1, fes2, fes3. Raw outputs follow the
/// classical minimization form; `evaluate` negates them. d <= 0 selects the
/// default dimension. Throws std::invalid_argument for unknown names or a d
/// the function does not support.
Problem make_named(const std::string& name, int d = 0);

/// Raw (minimization) formulations on their original domains.
Vector fonseca_raw(const Vector& x);
Vector kursawe_raw(const Vector& x);
Vector viennet_raw(const Vector& x);
Vector fes1_raw(const Vector& x);
Vector fes2_raw(const Vector& x);
Vector fes3_raw(const Vector& x);

/// Concatenates the outputs of two problems with the same d.
Problem make_combined(const Problem& a, const Problem& b);

}  // namespace pfev::problems
