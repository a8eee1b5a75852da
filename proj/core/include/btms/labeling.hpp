#pragma once

#include <vector>

#include "btms/bgk.hpp"
#include "btms/corner_fit.hpp"
#include "btms/tgf.hpp"

namespace btms {

struct LabelOptions {
  double eps3 = 0.125;
  bool two_sided = false;       // |s.p + d| <= eps3 instead of s.p + d <= eps3
  bool other_by_plane = false;  // test Other-node points against their plane too
};

struct StageTimings {
  double build_ms = 0.0;
  double fit_ms = 0.0;
  double search_ms = 0.0;
  double completion_ms = 0.0;
  double corners_ms = 0.0;
  double labeling_ms = 0.0;
  double total_ms = 0.0;
};

struct SegmentationStats {
  std::size_t nodes_total = 0;
  std::size_t nodes_terrain = 0;
  std::size_t nodes_completed = 0;
  std::size_t nodes_other = 0;
  std::size_t initial_terrain = 0;  // before the graph search
  std::size_t seeds = 0;

  std::size_t points_total = 0;
  std::size_t points_terrain = 0;
  std::size_t points_obstacle = 0;
  std::size_t dropped_nonfinite = 0;
  std::size_t out_of_bounds = 0;
  std::size_t unrefit_points = 0;
  bool degenerate_extent = false;

  CompletionStats completion;
  CornerStats corners;
  StageTimings timings;
};

struct SegmentationResult {
  std::vector<PointLabel> labels;
  TriGridField tgf;
  SegmentationStats stats;
};

// Labels each point of `cloud` against the node containing its xy. Points of
// Terrain/Completed nodes are Terrain when s.p + d <= eps3; points of Other
// nodes, of nodes without a plane, outside the grid or non-finite are
// Obstacle. Counts are accumulated into `stats` when given.
std::vector<PointLabel> label_cloud(const TriGridField& tgf, const PointCloud& cloud,
                                    const LabelOptions& options,
                                    SegmentationStats* stats = nullptr);

SegmentationResult label_points(TriGridField tgf, const PointCloud& cloud, double eps3);
SegmentationResult label_points(TriGridField tgf, const PointCloud& cloud,
                                const LabelOptions& options);

// Recomputes node-class counts into `stats`.
void count_node_classes(const TriGridField& tgf, SegmentationStats& stats);

}  // namespace btms
