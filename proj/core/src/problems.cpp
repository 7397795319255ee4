#include "pfev/problems.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "pfev/sampler.hpp"

namespace pfev::problems {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_double(double v, const char* spec = "%.17g") {
  char buf[32];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

Vector Problem::evaluate(const Vector& x) const {
  require(x.size() == d, "problem " + id + ": input dimension mismatch");
  return objective(x);
}

Matrix Problem::evaluate_batch(const Matrix& x) const {
  require(x.cols() == d, "problem " + id + ": input dimension mismatch");
  if (batch) return batch(x);
  Matrix out(x.rows(), L);
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.row(i) = objective(x.row(i).transpose()).transpose();
  return out;
}

Vector Problem::to_raw(const Vector& unit) const {
  return raw_domain.lower + (raw_domain.upper - raw_domain.lower).cwiseProduct(unit);
}

Problem make_synthetic_gp(int d, int L, double length_scale, std::uint64_t seed, int num_features) {
  require(d >= 1 && L >= 2, "synthetic problem needs d >= 1 and L >= 2");
  require(length_scale > 0.0 && num_features >= 1, "synthetic problem: bad length scale or feature count");
  gp::KernelParams params;
  params.length_scale = length_scale;
  auto path = std::make_shared<const sampler::SampledPath>(
      sampler::draw_prior_path(std::vector<gp::KernelParams>(static_cast<std::size_t>(L), params), d, num_features,
                               seed));
  Problem p;
  p.id = "synthetic-d" + std::to_string(d) + "-L" + std::to_string(L) + "-l" + format_double(length_scale, "%g") + "-s" +
         std::to_string(seed);
  p.d = d;
  p.L = L;
  p.objective = [path](const Vector& x) { return path->evaluate(x); };
  p.batch = [path](const Matrix& x) { return path->evaluate_batch(x); };
  p.metadata = {{"kind", "synthetic"},
                {"length_scale", format_double(length_scale)},
                {"seed", std::to_string(seed)},
                {"num_features", std::to_string(num_features)}};
  return p;
}

Vector fonseca_raw(const Vector& x) {
  const double d = static_cast<double>(x.size());
  const double c = 1.0 / std::sqrt(d);
  double s1 = 0.0;
  double s2 = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s1 += (x[i] - c) * (x[i] - c);
    s2 += (x[i] + c) * (x[i] + c);
  }
  Vector f(2);
  f << 1.0 - std::exp(-s1), 1.0 - std::exp(-s2);
  return f;
}

Vector kursawe_raw(const Vector& x) {
  require(x.size() == 3, "kursawe is defined for d = 3");
  double f1 = 0.0;
  for (int i = 0; i < 2; ++i) f1 += -10.0 * std::exp(-0.2 * std::sqrt(x[i] * x[i] + x[i + 1] * x[i + 1]));
  double f2 = 0.0;
  for (int i = 0; i < 3; ++i) f2 += std::pow(std::abs(x[i]), 0.8) + 5.0 * std::sin(x[i] * x[i] * x[i]);
  Vector f(2);
  f << f1, f2;
  return f;
}

Vector viennet_raw(const Vector& v) {
  require(v.size() == 2, "viennet is defined for d = 2");
  const double x = v[0];
  const double y = v[1];
  const double r2 = x * x + y * y;
  Vector f(3);
  f[0] = 0.5 * r2 + std::sin(r2);
  f[1] = (3 * x - 2 * y + 4) * (3 * x - 2 * y + 4) / 8.0 + (x - y + 1) * (x - y + 1) / 27.0 + 15.0;
  f[2] = 1.0 / (r2 + 1.0) - 1.1 * std::exp(-r2);
  return f;
}

Vector fes1_raw(const Vector& x) {
  const double d = static_cast<double>(x.size());
  Vector f = Vector::Zero(2);
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double i = static_cast<double>(k + 1);
    f[0] += std::sqrt(std::abs(x[k] - std::exp((i / d) * (i / d) / 3.0)));
    const double t = x[k] - 0.5 * std::cos(10.0 * kPi * i / d) - 0.5;
    f[1] += t * t;
  }
  return f;
}

Vector fes2_raw(const Vector& x) {
  const double d = static_cast<double>(x.size());
  Vector f = Vector::Zero(3);
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double i = static_cast<double>(k + 1);
    const double t = x[k] - 0.5 * std::cos(10.0 * kPi * i / d) - 0.5;
    f[0] += t * t;
    const double s = std::sin(i - 1.0);
    const double c = std::cos(i - 1.0);
    f[1] += std::sqrt(std::abs(x[k] - s * s * c * c));
    f[2] += std::sqrt(std::abs(x[k] - 0.25 * c * std::cos(2.0 * i - 2.0) - 0.5));
  }
  return f;
}

Vector fes3_raw(const Vector& x) {
  const double d = static_cast<double>(x.size());
  Vector f = Vector::Zero(4);
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double i = static_cast<double>(k + 1);
    f[0] += std::sqrt(std::abs(x[k] - std::exp((i / d) * (i / d)) / 3.0));
    const double s = std::sin(i - 1.0);
    const double c = std::cos(i - 1.0);
    f[1] += std::sqrt(std::abs(x[k] - s * s * c * c));
    f[2] += std::sqrt(std::abs(x[k] - (0.25 * c * std::cos(2.0 * i - 1.0) - 0.5)));
    const double t = x[k] - 0.5 * std::sin(1000.0 * kPi * i / d) - 0.5;
    f[3] += t * t;
  }
  return f;
}

Problem make_named(const std::string& name, int d) {
  Problem p;
  int default_d = 0;
  int num_outputs = 0;
  double lo = 0.0;
  double hi = 1.0;
  bool fixed_dim = false;
  if (name == "fonseca") {
    p.raw = fonseca_raw;
    default_d = 2, num_outputs = 2, lo = -4.0, hi = 4.0;
  } else if (name == "kursawe") {
    p.raw = kursawe_raw;
    default_d = 3, num_outputs = 2, lo = -5.0, hi = 5.0, fixed_dim = true;
  } else if (name == "viennet") {
    p.raw = viennet_raw;
    default_d = 2, num_outputs = 3, lo = -3.0, hi = 3.0, fixed_dim = true;
  } else if (name == "fes1") {
    p.raw = fes1_raw;
    default_d = 3, num_outputs = 2;
  } else if (name == "fes2") {
    p.raw = fes2_raw;
    default_d = 3, num_outputs = 3;
  } else if (name == "fes3") {
    p.raw = fes3_raw;
    default_d = 3, num_outputs = 4;
  } else {
    throw std::invalid_argument("unknown problem name: " + name);
  }
  if (d <= 0) d = default_d;
  require(!fixed_dim || d == default_d, name + " is only defined for d = " + std::to_string(default_d));
  p.id = name + "-d" + std::to_string(d);
  p.d = d;
  p.L = num_outputs;
  p.raw_domain = {Vector::Constant(d, lo), Vector::Constant(d, hi)};
  p.objective = [raw = p.raw, dom = p.raw_domain](const Vector& x) -> Vector {
    const Vector z = dom.lower + (dom.upper - dom.lower).cwiseProduct(x);
    return -raw(z);
  };
  p.metadata = {{"kind", "named"}, {"name", name}, {"sign", "negated"}};
  return p;
}

Problem make_combined(const Problem& a, const Problem& b) {
  require(a.d == b.d, "make_combined: input dimensions differ");
  Problem p;
  p.id = a.id + "+" + b.id;
  p.d = a.d;
  p.L = a.L + b.L;
  p.objective = [fa = a.objective, fb = b.objective, La = a.L, Lb = b.L](const Vector& x) -> Vector {
    Vector out(La + Lb);
    out << fa(x), fb(x);
    return out;
  };
  p.metadata = {{"kind", "combined"}, {"parts", a.id + "," + b.id}};
  return p;
}

}  // namespace pfev::problems
