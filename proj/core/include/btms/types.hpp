#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace btms {

using Point3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

using NodeId = std::uint32_t;
using CornerId = std::uint32_t;
using PointIndex = std::uint32_t;

// Flat list of points in meters. `labels`, when non-empty, holds one raw
// semantic id per point.
struct PointCloud {
  std::vector<Point3> points;
  std::vector<std::uint32_t> labels;
  std::optional<std::int64_t> frame_id;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  bool has_labels() const noexcept { return !labels.empty(); }
};

inline bool is_finite(const Point3& p) noexcept {
  return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z());
}

// Removes non-finite points (and their labels). Returns the number dropped.
std::size_t drop_nonfinite(PointCloud& cloud);

// Plane s.p + d = 0 with unit normal s (s_z >= 0) through mean point m.
struct PlanarModel {
  Vec3 normal{0.0, 0.0, 1.0};
  double offset = 0.0;
  Point3 mean{0.0, 0.0, 0.0};

  double signed_distance(const Point3& p) const noexcept {
    return normal.dot(p) + offset;
  }
};

// Builds a plane through `mean` with the given normal, flipped upward and
// normalized; offset is -s.m.
PlanarModel make_plane(const Vec3& normal, const Point3& mean);

// z of the plane above xy. Throws NearVerticalPlane when |s_z| <= 1e-6.
double plane_height_at(const PlanarModel& plane, const Vec2& xy);

// Eigenvalues in descending order.
struct EigenTriple {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
};

enum class NodeClass : std::uint8_t { TerrainCandidate, Terrain, Other, Completed };

enum class PointLabel : std::uint8_t { Obstacle = 0, Terrain = 1 };

// Three-way ground truth after mapping dataset label ids.
enum class GtClass : std::uint8_t { NonTerrain = 0, Terrain = 1, Ambiguous = 2 };

}  // namespace btms
