#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Geometry>

#include "btms/error.hpp"
#include "btms/plane_fit.hpp"
#include "helpers.hpp"

using namespace btms;

namespace {

std::vector<Point3> square(double z = 0.0) {
  return {{0, 0, z}, {1, 0, z}, {0, 1, z}, {1, 1, z}};
}

double residual(const PlanarModel& plane, std::span<const Point3> pts) {
  double r = 0.0;
  for (const auto& p : pts) r += std::pow(plane.signed_distance(p), 2);
  return r;
}

}  // namespace

TEST(plane_fit, horizontal_square) {
  auto [plane, eigs] = fit_planar_model(square());
  EXPECT_NEAR((plane.normal - Vec3::UnitZ()).norm(), 0.0, 1e-12);
  EXPECT_NEAR(plane.offset, 0.0, 1e-12);
  EXPECT_NEAR(eigs.l3, 0.0, 1e-15);
  EXPECT_NEAR(eigs.l1, 0.25, 1e-12);
  EXPECT_NEAR(eigs.l2, 0.25, 1e-12);
}

TEST(plane_fit, shifted_square) {
  auto [plane, eigs] = fit_planar_model(square(2.0));
  EXPECT_NEAR(plane.normal.z(), 1.0, 1e-12);
  EXPECT_NEAR(plane.offset, -2.0, 1e-12);
  EXPECT_NEAR((plane.mean - Point3(0.5, 0.5, 2.0)).norm(), 0.0, 1e-12);
}

TEST(plane_fit, plane_z_equals_x) {
  std::vector<Point3> pts;
  for (double x : {0.0, 1.0, 2.0})
    for (double y : {0.0, 1.0, 2.0}) pts.emplace_back(x, y, x);
  auto [plane, eigs] = fit_planar_model(pts);
  EXPECT_NEAR((plane.normal - Vec3(-std::sqrt(0.5), 0.0, std::sqrt(0.5))).norm(), 0.0, 1e-9);
  EXPECT_NEAR(plane.offset, 0.0, 1e-9);
  EXPECT_NEAR(eigs.l3, 0.0, 1e-12);
}

TEST(plane_fit, error_paths) {
  std::vector<Point3> two{{0, 0, 0}, {1, 0, 0}};
  EXPECT_EQ(try_fit_planar_model(two).status, FitStatus::TooFewPoints);
  EXPECT_THROW(fit_planar_model(two), Error);
  std::vector<Point3> line{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}};
  EXPECT_EQ(try_fit_planar_model(line).status, FitStatus::DegenerateCovariance);
  std::vector<Point3> same{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
  EXPECT_EQ(try_fit_planar_model(same).status, FitStatus::DegenerateCovariance);
  try {
    fit_planar_model(line);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateCovariance);
  }
}

TEST(plane_fit, residual_equals_smallest_eigenvalue_times_count) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::normal_distribution<double> g(0.0, 0.1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point3> pts;
    const double a = u(rng), b = u(rng);
    for (int i = 0; i < 30; ++i) {
      const double x = u(rng), y = u(rng);
      pts.emplace_back(x, y, a * x + b * y + g(rng));
    }
    auto [plane, eigs] = fit_planar_model(pts);
    EXPECT_NEAR(residual(plane, pts), eigs.l3 * pts.size(), 1e-6 * (1.0 + eigs.l3 * pts.size()));
    EXPECT_NEAR(plane.normal.norm(), 1.0, 1e-9);
    EXPECT_NEAR(plane.signed_distance(plane.mean), 0.0, 1e-9);
    EXPECT_GE(plane.normal.z(), 0.0);
    EXPECT_GE(eigs.l1, eigs.l2);
    EXPECT_GE(eigs.l2, eigs.l3);
    EXPECT_GE(eigs.l3, 0.0);
  }
}

TEST(plane_fit, rotation_about_z_preserves_eigenvalues_and_sz) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point3> pts;
  for (int i = 0; i < 25; ++i) {
    const double x = u(rng), y = u(rng);
    pts.emplace_back(x, y, 0.3 * x - 0.2 * y + 0.05 * u(rng));
  }
  auto [p0, e0] = fit_planar_model(pts);
  for (double angle : {0.3, 1.1, 2.7, -0.9}) {
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix();
    std::vector<Point3> turned;
    for (const auto& p : pts) turned.push_back(rot * p);
    auto [p1, e1] = fit_planar_model(turned);
    EXPECT_NEAR(e0.l1, e1.l1, 1e-9);
    EXPECT_NEAR(e0.l2, e1.l2, 1e-9);
    EXPECT_NEAR(e0.l3, e1.l3, 1e-9);
    EXPECT_NEAR(p0.normal.z(), p1.normal.z(), 1e-9);
  }
}

TEST(plane_fit, traversability_weight_examples) {
  EXPECT_DOUBLE_EQ(traversability_weight({1, 1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(traversability_weight({1, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(traversability_weight({4, 1, 0}), 0.25);
  EXPECT_DOUBLE_EQ(traversability_weight({0, 0, 0}), 0.0);
}

TEST(plane_fit, traversability_weight_bounds) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    double v[3] = {u(rng), u(rng), u(rng)};
    std::sort(v, v + 3, std::greater<>());
    const double w = traversability_weight({v[0], v[1], v[2]});
    EXPECT_GE(w, 0.0);
    EXPECT_LE(w, 1.0);
    if (w == 1.0) {
      EXPECT_EQ(v[2], 0.0);
      EXPECT_EQ(v[0], v[1]);
    }
  }
}

namespace {

TgfNode node_with(const Vec3& normal, std::size_t count) {
  TgfNode n;
  n.plane = make_plane(normal, Point3::Zero());
  n.point_indices.resize(count);
  return n;
}

}  // namespace

TEST(plane_fit, classify_initial_examples) {
  TgfConfig cfg;
  EXPECT_EQ(classify_initial(node_with(Vec3::UnitZ(), 20), cfg), NodeClass::Terrain);
  const double c30 = std::cos(M_PI / 6);
  EXPECT_EQ(classify_initial(node_with(Vec3(std::sin(M_PI / 6), 0, c30), 20), cfg), NodeClass::Other);
  EXPECT_EQ(classify_initial(node_with(Vec3::UnitZ(), 4), cfg), NodeClass::Other);
  TgfNode unfit;
  unfit.point_indices.resize(50);
  EXPECT_EQ(classify_initial(unfit, cfg), NodeClass::Other);
  EXPECT_EQ(classify_initial(node_with(Vec3::UnitZ(), 10), cfg), NodeClass::Terrain);
  EXPECT_EQ(classify_initial(node_with(Vec3::UnitZ(), 9), cfg), NodeClass::Other);
}

TEST(plane_fit, at_most_gate_inverts_count_test) {
  TgfConfig cfg;
  cfg.point_gate = PointCountGate::AtMost;
  EXPECT_EQ(classify_initial(node_with(Vec3::UnitZ(), 4), cfg), NodeClass::Terrain);
  EXPECT_EQ(classify_initial(node_with(Vec3::UnitZ(), 20), cfg), NodeClass::Other);
}

TEST(plane_fit, fit_and_classify_slope_normals) {
  const double deg = 30.0;
  auto cloud = test::plane_grid(0, 16, 0, 16, 0.25, std::tan(deg * M_PI / 180.0));
  TgfConfig cfg;
  auto tgf = build_tgf(cloud, cfg);
  fit_and_classify(tgf, cloud, cfg);
  std::size_t fitted = 0;
  for (const auto& node : tgf.nodes) {
    if (!node.plane) continue;
    ++fitted;
    EXPECT_NEAR(node.plane->normal.z(), std::cos(deg * M_PI / 180.0), 1e-9);
    EXPECT_EQ(node.cls, NodeClass::Other);
    EXPECT_GE(node.weight, 0.0);
    EXPECT_LE(node.weight, 1.0);
  }
  EXPECT_GT(fitted, 0u);
}
