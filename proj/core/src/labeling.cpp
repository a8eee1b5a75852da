#include "btms/labeling.hpp"

#include <cmath>

namespace btms {

std::vector<PointLabel> label_cloud(const TriGridField& tgf, const PointCloud& cloud,
                                    const LabelOptions& options, SegmentationStats* stats) {
  std::vector<PointLabel> labels(cloud.size(), PointLabel::Obstacle);
  std::size_t terrain = 0, oob = 0, unrefit = 0, dropped = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.points[i];
    if (!is_finite(p)) {
      ++dropped;
      continue;
    }
    const auto id = tgf.locate(Vec2(p.x(), p.y()));
    if (!id) {
      ++oob;
      continue;
    }
    const TgfNode& node = tgf.nodes[*id];
    if (!node.plane) {
      ++unrefit;
      continue;
    }
    if (node.cls == NodeClass::Other && !options.other_by_plane) continue;
    const double dist = node.plane->signed_distance(p);
    const bool is_terrain = options.two_sided ? std::abs(dist) <= options.eps3 : dist <= options.eps3;
    if (is_terrain) {
      labels[i] = PointLabel::Terrain;
      ++terrain;
    }
  }
  if (stats) {
    stats->points_total = cloud.size();
    stats->points_terrain = terrain;
    stats->points_obstacle = cloud.size() - terrain;
    stats->out_of_bounds = oob;
    stats->unrefit_points = unrefit;
    stats->dropped_nonfinite = dropped;
  }
  return labels;
}

void count_node_classes(const TriGridField& tgf, SegmentationStats& stats) {
  stats.nodes_total = tgf.node_count();
  stats.nodes_terrain = stats.nodes_completed = stats.nodes_other = 0;
  for (const auto& node : tgf.nodes) {
    switch (node.cls) {
      case NodeClass::Terrain: ++stats.nodes_terrain; break;
      case NodeClass::Completed: ++stats.nodes_completed; break;
      default: ++stats.nodes_other; break;
    }
  }
}

SegmentationResult label_points(TriGridField tgf, const PointCloud& cloud,
                                const LabelOptions& options) {
  SegmentationResult result;
  result.labels = label_cloud(tgf, cloud, options, &result.stats);
  result.stats.degenerate_extent = tgf.degenerate_extent;
  count_node_classes(tgf, result.stats);
  result.tgf = std::move(tgf);
  return result;
}

SegmentationResult label_points(TriGridField tgf, const PointCloud& cloud, double eps3) {
  LabelOptions options;
  options.eps3 = eps3;
  return label_points(std::move(tgf), cloud, options);
}

}  // namespace btms
