#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "btms/bgk.hpp"
#include "btms/error.hpp"
#include "helpers.hpp"

using namespace btms;

namespace {

KernelContributor contributor(NodeId id, double k, const Point3& m, const Vec3& s = Vec3::UnitZ(),
                              double w = 1.0) {
  return {id, k, m, s, w};
}

}  // namespace

TEST(sparse_kernel, reference_values) {
  const double l = 12.0;
  EXPECT_NEAR(sparse_kernel(0.0, l), 1.0, 1e-12);
  EXPECT_NEAR(sparse_kernel(l / 2, l), 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(sparse_kernel(l / 4, l), 0.5 + 1.0 / (2.0 * M_PI), 1e-12);
  EXPECT_NEAR(sparse_kernel(l / 4, l), 0.659155, 1e-6);
  EXPECT_EQ(sparse_kernel(l, l), 0.0);
  EXPECT_EQ(sparse_kernel(3 * l, l), 0.0);
}

TEST(sparse_kernel, bounds_and_monotone) {
  double prev = 1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double d = 1.5 * i / 2000.0;
    const double k = sparse_kernel(d, 1.0);
    EXPECT_GE(k, 0.0);
    EXPECT_LE(k, 1.0);
    EXPECT_LE(k, prev + 1e-15);
    prev = k;
  }
}

TEST(sparse_kernel, nonpositive_radius) {
  EXPECT_THROW(sparse_kernel(0.0, 0.0), Error);
  EXPECT_THROW(sparse_kernel(1.0, -1.0), Error);
}

TEST(infer_z, examples) {
  KernelNeighborhood one{0, {contributor(1, 0.3, {1, 0, 3})}};
  EXPECT_NEAR(infer_z(one), 3.0, 1e-12);
  KernelNeighborhood two{0, {contributor(1, 0.5, {1, 0, 0}), contributor(2, 0.5, {-1, 0, 2})}};
  EXPECT_NEAR(infer_z(two), 1.0, 1e-12);
  const double l = 8.0;
  KernelNeighborhood mixed{0, {contributor(1, sparse_kernel(l / 4, l), {2, 0, 0}),
                               contributor(2, sparse_kernel(l / 2, l), {4, 0, 1})}};
  EXPECT_NEAR(infer_z(mixed), 0.2018, 1e-4);
  EXPECT_THROW(infer_z(KernelNeighborhood{}), Error);
}

TEST(infer_z, convex_combination) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 200; ++t) {
    KernelNeighborhood h;
    double lo = 1e9, hi = -1e9;
    for (int i = 0; i < 6; ++i) {
      const double z = 10 * u(rng) - 5;
      lo = std::min(lo, z);
      hi = std::max(hi, z);
      h.contributors.push_back(contributor(i, u(rng), {u(rng), u(rng), z}));
    }
    const double z = infer_z(h);
    EXPECT_GE(z, lo - 1e-12);
    EXPECT_LE(z, hi + 1e-12);
  }
}

TEST(normal_from_pair, examples) {
  const double h = std::sqrt(0.5);
  EXPECT_NEAR((normal_from_pair({0, 0, 0}, {1, 0, 0}) - Vec3(0, 0, 1)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((normal_from_pair({0, 0, 0}, {1, 0, 1}) - Vec3(-h, 0, h)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((normal_from_pair({0, 0, 0}, {0, 1, -1}) - Vec3(0, h, h)).norm(), 0.0, 1e-12);
  try {
    normal_from_pair({1, 1, 0}, {1, 1, 5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::VerticalDisplacement);
  }
}

TEST(infer_normal, examples) {
  const double h = std::sqrt(0.5);
  KernelNeighborhood ring;
  for (int i = 0; i < 8; ++i) {
    const double a = i * M_PI / 4;
    ring.contributors.push_back(contributor(i, 0.4, {2 * std::cos(a), 2 * std::sin(a), 0.5}));
  }
  auto flat = infer_normal(Point3(0, 0, 0.5), ring);
  EXPECT_NEAR((flat.normal - Vec3::UnitZ()).norm(), 0.0, 1e-12);
  EXPECT_FALSE(flat.fallback);

  KernelNeighborhood single{0, {contributor(1, 0.7, {0, 0, 0})}};
  EXPECT_NEAR((infer_normal(Point3(1, 0, 1), single).normal - Vec3(-h, 0, h)).norm(), 0.0, 1e-12);

  KernelNeighborhood pair{0, {contributor(1, 0.5, {-1, 0, 0}), contributor(2, 0.5, {1, 0, 0})}};
  auto sym = infer_normal(Point3(0, 0, 1), pair);
  EXPECT_NEAR((sym.normal - Vec3::UnitZ()).norm(), 0.0, 1e-12);

  KernelNeighborhood above{0, {contributor(1, 0.5, {0, 0, 2}), contributor(2, 0.5, {1, 0, 0})}};
  auto skipped = infer_normal(Point3(0, 0, 0), above);
  EXPECT_EQ(skipped.skipped, 1u);

  KernelNeighborhood vertical_only{0, {contributor(1, 0.5, {0, 0, 2})}};
  EXPECT_THROW(infer_normal(Point3(0, 0, 0), vertical_only), Error);
}

TEST(infer_weight, examples) {
  KernelNeighborhood same{0, {contributor(1, 0.6, {1, 0, 0}), contributor(2, 0.2, {0, 1, 0})}};
  EXPECT_NEAR(infer_weight(same, Vec3::UnitZ()), 1.0, 1e-12);
  EXPECT_NEAR(infer_weight(same, Vec3::UnitX()), 0.0, 1e-12);
  EXPECT_EQ(infer_weight(same, -Vec3::UnitZ()), 0.0);
  const double t = 20.0 * M_PI / 180.0;
  KernelNeighborhood one{0, {contributor(1, 0.5, {1, 0, 0}), }};
  one.contributors[0].weight = 0.8;
  EXPECT_NEAR(infer_weight(one, Vec3(std::sin(t), 0, std::cos(t))), 0.8 * std::cos(t), 1e-12);
  EXPECT_NEAR(0.8 * std::cos(t), 0.7518, 1e-4);
  EXPECT_THROW(infer_weight(KernelNeighborhood{}, Vec3::UnitZ()), Error);
}

TEST(complete, hole_in_flat_ring) {
  auto tgf = test::flat_field(5, 5, 1.0);
  for (auto& n : tgf.nodes) n.weight = 0.7;
  const NodeId hole = 4 * (2 * 5 + 2) + 1;
  tgf.nodes[hole].cls = NodeClass::Other;
  tgf.nodes[hole].plane.reset();
  TgfConfig cfg;
  cfg.resolution = 1.0;
  const auto stats = complete(tgf, cfg);
  EXPECT_EQ(stats.completed, 1u);
  const auto& n = tgf.nodes[hole];
  EXPECT_EQ(n.cls, NodeClass::Completed);
  ASSERT_TRUE(n.plane);
  EXPECT_NEAR((n.plane->normal - Vec3::UnitZ()).norm(), 0.0, 1e-9);
  EXPECT_NEAR(n.plane->offset, 0.0, 1e-12);
  EXPECT_NEAR((n.plane->mean.head<2>() - n.center).norm(), 0.0, 1e-12);
  EXPECT_NEAR(n.weight, 0.7, 1e-12);
}

TEST(complete, isolated_node_stays_other) {
  auto tgf = test::flat_field(20, 1, 1.0);
  for (auto& n : tgf.nodes) {
    const auto [cx, cy] = tgf.cell_of(n.id);
    if (cx > 0) n.cls = NodeClass::Other;
  }
  TgfConfig cfg;
  cfg.resolution = 1.0;
  cfg.kernel_radius = 3.0;
  auto before = tgf;
  const auto stats = complete(tgf, cfg);
  EXPECT_GT(stats.empty_neighborhood, 0u);
  EXPECT_EQ(tgf.nodes.back().cls, NodeClass::Other);
  for (std::size_t i = 0; i < tgf.node_count(); ++i) {
    if (before.nodes[i].cls == NodeClass::Terrain) {
      EXPECT_EQ(tgf.nodes[i].cls, NodeClass::Terrain);
      EXPECT_EQ(tgf.nodes[i].plane->offset, before.nodes[i].plane->offset);
    }
    EXPECT_EQ(tgf.nodes[i].point_indices, before.nodes[i].point_indices);
  }
}

TEST(complete, overhang_node_uses_ring_elevation) {
  auto tgf = test::flat_field(5, 5, 1.0, [](const Vec2&) { return -0.4; });
  const NodeId covered = 4 * (2 * 5 + 2);
  tgf.nodes[covered].cls = NodeClass::Other;
  tgf.nodes[covered].plane = make_plane(Vec3::UnitZ(), Point3(2.5, 2.8, 2.0));
  TgfConfig cfg;
  cfg.resolution = 1.0;
  complete(tgf, cfg);
  EXPECT_EQ(tgf.nodes[covered].cls, NodeClass::Completed);
  EXPECT_NEAR(tgf.nodes[covered].plane->mean.z(), -0.4, 1e-12);
}

TEST(complete, gates_keep_nodes_other) {
  auto tgf = test::flat_field(3, 3, 1.0);
  for (auto& n : tgf.nodes) n.weight = 0.3;
  tgf.nodes[16].cls = NodeClass::Other;
  TgfConfig cfg;
  cfg.resolution = 1.0;
  auto a = tgf;
  cfg.completion_min_weight = 0.5;
  auto sa = complete(a, cfg);
  EXPECT_EQ(sa.below_weight, 1u);
  EXPECT_EQ(a.nodes[16].cls, NodeClass::Other);
  cfg.completion_min_weight = 0.0;
  cfg.completion_min_mass = 1e6;
  auto sb = complete(tgf, cfg);
  EXPECT_EQ(sb.below_mass, 1u);
}

TEST(complete, single_pass_no_chaining) {
  // A row of Other nodes: only those within reach of Terrain complete, and
  // the outcome does not depend on which were visited first.
  auto tgf = test::flat_field(12, 1, 1.0);
  for (auto& n : tgf.nodes) {
    const auto [cx, cy] = tgf.cell_of(n.id);
    if (cx >= 2) n.cls = NodeClass::Other;
  }
  TgfConfig cfg;
  cfg.resolution = 1.0;
  cfg.kernel_radius = 2.0;
  complete(tgf, cfg);
  for (const auto& n : tgf.nodes) {
    if (n.center.x() > 4.0) EXPECT_EQ(n.cls, NodeClass::Other) << n.id;
  }
}
