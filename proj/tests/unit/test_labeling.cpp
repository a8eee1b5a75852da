#include <gtest/gtest.h>

#include <random>

#include "btms/error.hpp"
#include "btms/labeling.hpp"
#include "btms/pipeline.hpp"
#include "btms/synth.hpp"
#include "helpers.hpp"

using namespace btms;

namespace {

PointCloud points(std::initializer_list<Point3> pts) {
  PointCloud c;
  c.points = pts;
  return c;
}

}  // namespace

TEST(label_points, threshold_examples) {
  auto tgf = test::flat_field(2, 2, 1.0);
  auto r = label_points(tgf, points({{0.5, 0.2, 0.10}, {0.5, 0.2, 0.20}, {0.5, 0.2, 0.0}, {0.5, 0.2, 0.125}}), 0.125);
  ASSERT_EQ(r.labels.size(), 4u);
  EXPECT_EQ(r.labels[0], PointLabel::Terrain);
  EXPECT_EQ(r.labels[1], PointLabel::Obstacle);
  EXPECT_EQ(r.labels[2], PointLabel::Terrain);
  EXPECT_EQ(r.labels[3], PointLabel::Terrain);
  EXPECT_EQ(r.stats.points_terrain, 3u);
}

TEST(label_points, one_and_two_sided) {
  auto tgf = test::flat_field(1, 1, 1.0);
  auto below = points({{0.5, 0.5, -2.0}});
  EXPECT_EQ(label_points(tgf, below, 0.125).labels[0], PointLabel::Terrain);
  LabelOptions two;
  two.two_sided = true;
  EXPECT_EQ(label_points(tgf, below, two).labels[0], PointLabel::Obstacle);
}

TEST(label_points, unlabeled_cases_are_obstacle_and_counted) {
  auto tgf = test::flat_field(2, 1, 1.0);
  tgf.nodes[0].plane.reset();
  tgf.nodes[4].cls = NodeClass::Other;
  auto cloud = points({{0.5, 0.9, 0.0}, {1.5, 0.9, 0.0}, {9.0, 9.0, 0.0}, {std::nan(""), 0, 0}});
  auto r = label_points(tgf, cloud, 0.125);
  for (auto l : r.labels) EXPECT_EQ(l, PointLabel::Obstacle);
  EXPECT_EQ(r.stats.unrefit_points, 1u);
  EXPECT_EQ(r.stats.out_of_bounds, 1u);
  EXPECT_EQ(r.stats.dropped_nonfinite, 1u);
  LabelOptions by_plane;
  by_plane.other_by_plane = true;
  EXPECT_EQ(label_points(tgf, cloud, by_plane).labels[1], PointLabel::Terrain);
}

TEST(label_points, monotone_in_eps3_and_shift_invariant) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.0, 4.0), z(-0.5, 0.5);
  PointCloud cloud;
  for (int i = 0; i < 3000; ++i) cloud.points.emplace_back(u(rng), u(rng), z(rng));
  auto tgf = test::flat_field(4, 4, 1.0, [](const Vec2& c) { return 0.05 * c.x(); });
  resolve_corners(tgf);
  refit_planes(tgf);
  std::vector<PointLabel> prev(cloud.size(), PointLabel::Obstacle);
  for (double eps3 : {0.0, 0.05, 0.1, 0.2, 0.4}) {
    auto labels = label_cloud(tgf, cloud, LabelOptions{eps3});
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (prev[i] == PointLabel::Terrain) EXPECT_EQ(labels[i], PointLabel::Terrain);
    prev = labels;
  }
  auto shifted_cloud = cloud;
  for (auto& p : shifted_cloud.points) p.z() += 3.25;
  auto shifted = tgf;
  for (auto& c : shifted.corners) *c.elevation += 3.25;
  refit_planes(shifted);
  EXPECT_EQ(label_cloud(tgf, cloud, LabelOptions{0.125}), label_cloud(shifted, shifted_cloud, LabelOptions{0.125}));
}

TEST(segment, flat_field_mostly_terrain) {
  synth::SceneSpec spec;
  spec.extent = 20;
  spec.density = 30;
  spec.rng_seed = 3;
  auto scene = synth::generate(spec);
  for (const auto& cfg : {presets::single_scan(), presets::partial_map()}) {
    auto r = segment(scene.cloud, cfg);
    EXPECT_GE(static_cast<double>(r.stats.points_terrain) / scene.cloud.size(), 0.99);
  }
}

TEST(segment, box_points_are_obstacle) {
  synth::SceneSpec spec;
  synth::Box box;
  box.center = Vec2(6, 5);
  box.half_size = Vec2(1.5, 1.5);
  box.height = 1.5;
  spec.kind = synth::Composite{{synth::Flat{}, box}};
  spec.extent = 24;
  spec.density = 40;
  spec.rng_seed = 4;
  auto scene = synth::generate(spec);
  auto r = segment(scene.cloud, presets::single_scan());
  // Side returns inside the eps3 band are indistinguishable from ground; every
  // box point above it must be Obstacle.
  const double eps3 = presets::single_scan().eps3;
  std::size_t wrong_box = 0, boxes = 0;
  for (std::size_t i = 0; i < scene.truth.size(); ++i) {
    const auto& p = scene.cloud.points[i];
    if (scene.truth[i] != GtClass::NonTerrain || p.z() - scene.surface(p.head<2>()) <= eps3) continue;
    ++boxes;
    wrong_box += r.labels[i] == PointLabel::Terrain;
  }
  ASSERT_GT(boxes, 0u);
  EXPECT_EQ(wrong_box, 0u);
  EXPECT_GE(synth::oracle_score(r, scene.truth).recall, 0.95);
}

TEST(segment, completion_ablation) {
  synth::SceneSpec spec;
  synth::Pit pit;
  pit.center = Vec2(10, 0);
  pit.radius = 8;
  pit.depth = 1.5;
  pit.observed = false;
  spec.kind = pit;
  spec.extent = 40;
  spec.density = 20;
  spec.noise_sigma = 0.02;
  spec.rng_seed = 3;
  auto scene = synth::generate(spec);
  auto on = presets::single_scan();
  auto off = on;
  off.completion_enabled = false;
  auto ron = segment(scene.cloud, on);
  auto roff = segment(scene.cloud, off);
  EXPECT_EQ(roff.stats.nodes_completed, 0u);
  EXPECT_GT(ron.stats.nodes_completed, 0u);
  for (std::size_t i = 0; i < ron.tgf.node_count(); ++i) {
    if (roff.tgf.nodes[i].cls == NodeClass::Terrain) EXPECT_EQ(ron.tgf.nodes[i].cls, NodeClass::Terrain);
    if (ron.tgf.nodes[i].cls == NodeClass::Terrain) EXPECT_EQ(roff.tgf.nodes[i].cls, NodeClass::Terrain);
  }

  auto observed = synth::generate(synth::with_pits_observed(spec));
  PointCloud floor;
  for (const auto& p : observed.cloud.points)
    if (synth::in_pit_footprint(spec, p.head<2>())) floor.points.push_back(p);
  auto count = [&](const SegmentationResult& r, const TgfConfig& cfg) {
    std::size_t t = 0;
    for (auto l : label_cloud(r.tgf, floor, label_options(cfg))) t += l == PointLabel::Terrain;
    return static_cast<double>(t) / floor.size();
  };
  EXPECT_GT(count(ron, on), 0.9);
  EXPECT_LT(count(roff, off), 0.5);
}

TEST(segment, deterministic_rerun) {
  synth::SceneSpec spec;
  spec.kind = synth::Composite{{synth::Bumpy{}, synth::Box{}}};
  spec.noise_sigma = 0.03;
  spec.rng_seed = 9;
  auto scene = synth::generate(spec);
  auto a = segment(scene.cloud, presets::single_scan());
  auto b = segment(scene.cloud, presets::single_scan());
  EXPECT_EQ(a.labels, b.labels);
  for (std::size_t i = 0; i < a.tgf.node_count(); ++i) {
    EXPECT_EQ(a.tgf.nodes[i].cls, b.tgf.nodes[i].cls);
    if (a.tgf.nodes[i].plane) EXPECT_EQ(a.tgf.nodes[i].plane->offset, b.tgf.nodes[i].plane->offset);
  }
}

TEST(segment, errors_carry_stage) {
  try {
    segment(PointCloud{}, presets::single_scan());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyCloud);
    EXPECT_NE(std::string(e.what()).find("build_tgf"), std::string::npos);
  }
  // A vertical wall gives no terrain node.
  PointCloud wall;
  for (int i = 0; i < 400; ++i) wall.points.emplace_back(0.01 * (i % 7), 0.1 * (i % 20), 0.1 * (i / 20));
  try {
    segment(wall, presets::single_scan());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoTerrainNodes);
    EXPECT_NE(std::string(e.what()).find("btgs"), std::string::npos);
  }
  auto bad = presets::single_scan();
  bad.resolution = -1;
  EXPECT_THROW(segment(wall, bad), Error);
}
