#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "btms/btgs.hpp"
#include "btms/error.hpp"
#include "helpers.hpp"

using namespace btms;

namespace {

PlanarModel plane(const Vec3& n, const Point3& m) { return make_plane(n, m); }

}  // namespace

TEST(lcc, coplanar_flat_neighbors) {
  EXPECT_TRUE(lcc(plane(Vec3::UnitZ(), {0, 0, 0}), plane(Vec3::UnitZ(), {2, 0, 0}), 0.03, 0.1));
}

TEST(lcc, ground_versus_wall) {
  EXPECT_FALSE(lcc(plane(Vec3::UnitZ(), {0, 0, 0}), plane(Vec3::UnitX(), {2, 0, 0}), 0.03, 0.1));
}

TEST(lcc, step_edge) {
  EXPECT_FALSE(lcc(plane(Vec3::UnitZ(), {0, 0, 0}), plane(Vec3::UnitZ(), {2, 0, 1}), 0.03, 0.1));
  EXPECT_TRUE(lcc(plane(Vec3::UnitZ(), {0, 0, 0}), plane(Vec3::UnitZ(), {2, 0, 0.05}), 0.03, 0.1));
}

TEST(lcc, missing_plane_throws) {
  TgfNode a, b;
  a.plane = plane(Vec3::UnitZ(), {0, 0, 0});
  try {
    lcc(a, b, 0.03, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingPlane);
  }
}

TEST(lcc, symmetric_under_swap) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int agreed_true = 0;
  for (int i = 0; i < 20000; ++i) {
    Vec3 ni = Vec3(0.1 * u(rng), 0.1 * u(rng), 1.0);
    Vec3 nj = Vec3(0.1 * u(rng), 0.1 * u(rng), 1.0);
    Point3 mi(u(rng), u(rng), 0.05 * u(rng));
    Point3 mj(u(rng) + 2, u(rng), 0.05 * u(rng));
    const auto pi = plane(ni, mi), pj = plane(nj, mj);
    const bool a = lcc(pi, pj, 0.03, 0.1);
    EXPECT_EQ(a, lcc(pj, pi, 0.03, 0.1));
    agreed_true += a;
  }
  EXPECT_GT(agreed_true, 0);
}

TEST(seeds, origin_policy_picks_node_at_origin) {
  TriGridField tgf(Vec2(-2, -2), 1.0, 4, 4);
  for (auto& n : tgf.nodes) {
    n.plane = make_plane(Vec3::UnitZ(), Point3(n.center.x(), n.center.y(), 0));
    n.cls = NodeClass::Terrain;
  }
  const auto seeds = select_seeds(tgf, SeedPolicy::origin());
  ASSERT_EQ(seeds.node_ids.size(), 1u);
  EXPECT_EQ(seeds.node_ids[0], *tgf.locate(Vec2(0, 0)));

  // Not Terrain at the origin: fall back to the nearest Terrain centroid.
  const NodeId at = seeds.node_ids[0];
  tgf.nodes[at].cls = NodeClass::Other;
  const auto fallback = select_seeds(tgf, SeedPolicy::origin());
  ASSERT_EQ(fallback.node_ids.size(), 1u);
  EXPECT_NE(fallback.node_ids[0], at);
  EXPECT_EQ(tgf.nodes[fallback.node_ids[0]].cls, NodeClass::Terrain);
}

TEST(seeds, lowest_qualifying_picks_basin) {
  auto tgf = test::flat_field(4, 1, 1.0, [](const Vec2& c) { return c.x() < 2.0 ? 3.0 : -1.5; });
  tgf.nodes[15].plane->mean.z() = -2.0;
  tgf.nodes[14].cls = NodeClass::Other;
  const auto seeds = select_seeds(tgf, SeedPolicy::lowest_qualifying());
  ASSERT_EQ(seeds.node_ids.size(), 1u);
  EXPECT_EQ(seeds.node_ids[0], 15u);
}

TEST(seeds, explicit_points_dedup) {
  auto tgf = test::flat_field(3, 3, 1.0);
  auto seeds = select_seeds(tgf, SeedPolicy::explicit_points({{0.5, 0.9}, {0.5, 0.85}}));
  EXPECT_EQ(seeds.node_ids.size(), 1u);
  seeds = select_seeds(tgf, SeedPolicy::explicit_points({{2.5, 2.9}, {0.5, 0.85}}));
  EXPECT_EQ(seeds.node_ids.size(), 2u);
  EXPECT_TRUE(std::is_sorted(seeds.node_ids.begin(), seeds.node_ids.end()));
}

TEST(seeds, no_terrain_throws) {
  TriGridField tgf(Vec2(0, 0), 1.0, 2, 2);
  for (auto& n : tgf.nodes) n.cls = NodeClass::Other;
  try {
    select_seeds(tgf, SeedPolicy::origin());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoTerrainNodes);
  }
}

namespace {

// Row of cells along x; every node gets the plane of its cell.
TriGridField strip(int n, const std::vector<PlanarModel>& cell_planes) {
  TriGridField tgf(Vec2(0, 0), 2.0, n, 1);
  for (auto& node : tgf.nodes) {
    const auto [cx, cy] = tgf.cell_of(node.id);
    PlanarModel p = cell_planes[cx];
    p = make_plane(p.normal, Point3(node.center.x(), node.center.y(),
                                    p.normal.z() > 0.5 ? plane_height_at(p, node.center) : p.mean.z()));
    node.plane = p;
    node.cls = NodeClass::Terrain;
  }
  return tgf;
}

}  // namespace

TEST(traverse, flat_strip_all_reached) {
  const auto flat = make_plane(Vec3::UnitZ(), Point3::Zero());
  auto tgf = strip(3, {flat, flat, flat});
  const auto order = traverse(tgf, SeedSet{{0}}, TgfConfig{});
  EXPECT_EQ(order.size(), tgf.node_count());
  EXPECT_EQ(order.front(), 0u);
  for (const auto& n : tgf.nodes) EXPECT_EQ(n.cls, NodeClass::Terrain);
}

TEST(traverse, wall_blocks_search) {
  const auto flat = make_plane(Vec3::UnitZ(), Point3::Zero());
  const auto wall = make_plane(Vec3::UnitX(), Point3(3, 0, 0.5));
  auto tgf = strip(3, {flat, wall, flat});
  const auto order = traverse(tgf, SeedSet{{0}}, TgfConfig{});
  for (const auto& n : tgf.nodes) {
    const auto [cx, cy] = tgf.cell_of(n.id);
    EXPECT_EQ(n.cls, cx == 0 ? NodeClass::Terrain : NodeClass::Other) << n.id;
  }
  EXPECT_EQ(order.size(), 4u);
}

TEST(traverse, full_seed_set_is_closure) {
  auto tgf = test::flat_field(4, 4, 1.0);
  SeedSet all;
  for (const auto& n : tgf.nodes) all.node_ids.push_back(n.id);
  traverse(tgf, all, TgfConfig{});
  for (const auto& n : tgf.nodes) EXPECT_EQ(n.cls, NodeClass::Terrain);
}

TEST(traverse, never_promotes_other_and_ignores_order_of_seeds) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    auto tgf = test::flat_field(5, 5, 1.0, [&](const Vec2&) { return 0.02 * u(rng); });
    std::vector<NodeClass> before;
    for (auto& n : tgf.nodes) {
      if (u(rng) > 0.6) n.cls = NodeClass::Other;
      before.push_back(n.cls);
    }
    std::vector<NodeId> ids;
    for (const auto& n : tgf.nodes)
      if (n.cls == NodeClass::Terrain && u(rng) > 0.8) ids.push_back(n.id);
    if (ids.empty()) continue;
    auto a = tgf, b = tgf;
    traverse(a, SeedSet{ids}, TgfConfig{});
    std::reverse(ids.begin(), ids.end());
    traverse(b, SeedSet{ids}, TgfConfig{});
    for (std::size_t i = 0; i < tgf.node_count(); ++i) {
      EXPECT_EQ(a.nodes[i].cls, b.nodes[i].cls);
      if (before[i] == NodeClass::Other) EXPECT_EQ(a.nodes[i].cls, NodeClass::Other);
    }
  }
}

TEST(traverse, invalid_seed) {
  auto tgf = test::flat_field(1, 1, 1.0);
  EXPECT_THROW(traverse(tgf, SeedSet{{99}}, TgfConfig{}), Error);
}
