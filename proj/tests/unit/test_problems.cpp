#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "spot_values.hpp"
#include "pfev/geometry.hpp"
#include "pfev/problems.hpp"
#include "pfev/reference_frontier.hpp"

using namespace pfev;
using namespace pfev::problems;
using namespace spot;

namespace {

void expect_close(const Vector& a, const Vector& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "component " << i;
}

}  // namespace

TEST(Named, DocumentedSpotValues) {
  const double c = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(fonseca_raw(vec({c, c}))[0], 0.0, 1e-15);
  expect_close(kursawe_raw(vec({0, 0, 0})), vec({-20, 0}), 1e-12);
  const Vector v = viennet_raw(vec({0, 0}));
  expect_close(v, vec({0, 15 + 2 + 1.0 / 27, -0.1}), 1e-12);
  EXPECT_NEAR(v[1], 17.03704, 1e-5);
}

TEST(Named, ThreeSpotValuesEach) {
  for (const auto& p : {vec({0.3, -1.2}), vec({2.5, 0.1}), vec({-4.0, 3.7})}) expect_close(fonseca_raw(p), fonseca2(p[0], p[1]), 1e-9);
  for (const auto& p : {vec({1.0, -2.0, 0.5}), vec({-4.5, 3.3, 0.0}), vec({2.2, 2.2, -1.7})})
    expect_close(kursawe_raw(p), kursawe3(p[0], p[1], p[2]), 1e-9);
  for (const auto& p : {vec({1.0, 1.0}), vec({-2.5, 0.7}), vec({3.0, -3.0})}) expect_close(viennet_raw(p), viennet2(p[0], p[1]), 1e-9);
  for (const auto& p : {vec({0.1, 0.5, 0.9}), vec({1.0, 0.0, 0.3}), vec({0.77, 0.21, 0.64})}) {
    expect_close(fes1_raw(p), fes1_3(p), 1e-9);
    expect_close(fes2_raw(p), fes2_3(p), 1e-9);
    expect_close(-fes3_raw(p), fes3_3_listed(p), 1e-9);
  }
}

TEST(Named, UnitBoxMapsToRawDomain) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const std::string name : {"fonseca", "kursawe", "viennet", "fes1", "fes2", "fes3"}) {
    const Problem p = make_named(name);
    for (int t = 0; t < 20; ++t) {
      Vector x(p.d);
      for (int i = 0; i < p.d; ++i) x[i] = u(rng);
      const Vector raw_x = p.raw_domain.lower + (p.raw_domain.upper - p.raw_domain.lower).cwiseProduct(x);
      expect_close(p.evaluate(x), -p.raw(raw_x), 1e-12);
      expect_close(p.to_raw(x), raw_x, 0.0);
    }
  }
}

TEST(Named, UnknownNameAndBadDimension) {
  EXPECT_THROW(make_named("zdt1"), std::invalid_argument);
  EXPECT_THROW(make_named("kursawe", 4), std::invalid_argument);
  EXPECT_THROW(make_named("fonseca").evaluate(Vector::Zero(3)), std::invalid_argument);
}

TEST(Combined, ShapesAndConcatenation) {
  const Problem fv = make_combined(make_named("fonseca"), make_named("viennet"));
  EXPECT_EQ(fv.d, 2);
  EXPECT_EQ(fv.L, 5);
  const Problem fk = make_combined(make_named("fes3"), make_named("kursawe"));
  EXPECT_EQ(fk.d, 3);
  EXPECT_EQ(fk.L, 6);
  const Vector x = vec({0.2, 0.9});
  const Vector out = fv.evaluate(x);
  EXPECT_EQ(out.head(2), make_named("fonseca").evaluate(x));
  EXPECT_EQ(out.tail(3), make_named("viennet").evaluate(x));
  EXPECT_THROW(make_combined(make_named("fonseca"), make_named("kursawe")), std::invalid_argument);
}

TEST(Synthetic, Deterministic) {
  const Problem a = make_synthetic_gp(2, 3, 0.1, 7);
  const Problem b = make_synthetic_gp(2, 3, 0.1, 7);
  const Problem c = make_synthetic_gp(2, 3, 0.1, 8);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool differs = false;
  for (int t = 0; t < 50; ++t) {
    const Vector x = vec({u(rng), u(rng)});
    EXPECT_EQ(a.evaluate(x), b.evaluate(x));
    differs = differs || a.evaluate(x) != c.evaluate(x);
  }
  EXPECT_TRUE(differs);
}

TEST(Synthetic, UnitVarianceUncorrelatedObjectives) {
  const Problem p = make_synthetic_gp(3, 2, 0.1, 3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x(10000, 3);
  for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) << u(rng), u(rng), u(rng);
  const Matrix f = p.evaluate_batch(x);
  const Eigen::RowVectorXd mean = f.colwise().mean();
  const Matrix centered = f.rowwise() - mean;
  const Matrix cov = centered.transpose() * centered / static_cast<double>(f.rows() - 1);
  for (int l = 0; l < 2; ++l) {
    EXPECT_GE(cov(l, l), 0.7);
    EXPECT_LE(cov(l, l), 1.3);
  }
  const double corr = cov(0, 1) / std::sqrt(cov(0, 0) * cov(1, 1));
  EXPECT_LE(std::abs(corr), 0.1);
}

TEST(Reference, BisphereHypervolume) {
  Problem p;
  p.id = "bisphere";
  p.d = 1;
  p.L = 2;
  p.objective = [](const Vector& x) { return vec({-x[0] * x[0], -(x[0] - 1) * (x[0] - 1)}); };
  reference::Config cfg;
  cfg.generations = 1000;
  const ParetoSet front = reference::build(p, cfg);
  // Area between the curve (-s, -(1 - sqrt s)^2) and the reference point (-1, -1).
  const double analytic = 5.0 / 6.0;
  EXPECT_NEAR(geometry::hypervolume(front, vec({-1, -1})), analytic, 0.01 * analytic);
}

TEST(Reference, CacheHitIsBitIdentical) {
  const auto dir = std::filesystem::temp_directory_path() / "pfev_test_cache";
  std::filesystem::remove_all(dir);
  reference::Config cfg;
  cfg.generations = 50;
  cfg.cache_dir = dir.string();
  const Problem p = make_named("viennet");
  const ParetoSet first = reference::build(p, cfg);
  ASSERT_TRUE(std::filesystem::exists(dir / reference::cache_file_name(p.id, cfg)));
  const ParetoSet second = reference::build(p, cfg);
  EXPECT_EQ(first.points, second.points);
  EXPECT_EQ(first.inputs, second.inputs);
  std::filesystem::remove_all(dir);
}

TEST(Reference, FonsecaConvergedAtBudget) {
  const Problem p = make_named("fonseca");
  reference::Config cfg;
  cfg.generations = 2000;
  const ParetoSet a = reference::build(p, cfg);
  cfg.generations = 4000;
  const ParetoSet b = reference::build(p, cfg);
  const Vector ref = vec({-1.0, -1.0});
  const double ha = geometry::hypervolume(a, ref);
  const double hb = geometry::hypervolume(b, ref);
  EXPECT_LT(std::abs(hb - ha) / hb, 0.005);
}
