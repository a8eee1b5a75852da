#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "btms/config.hpp"
#include "btms/types.hpp"

namespace btms {

// Position of a triangle inside its square cell. The four triangles share
// the cell center as apex.
enum class CellTriangle : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

struct TgfNode {
  NodeId id = 0;
  Vec2 center{0.0, 0.0};                 // triangle centroid (xy)
  std::array<CornerId, 3> corners{};     // counter-clockwise, apex first
  std::vector<PointIndex> point_indices;
  std::optional<PlanarModel> plane;
  EigenTriple eigenvalues;
  double weight = 0.0;                   // traversability weight in [0, 1]
  NodeClass cls = NodeClass::TerrainCandidate;

  std::size_t point_count() const noexcept { return point_indices.size(); }
};

struct TgfCorner {
  Vec2 xy{0.0, 0.0};
  std::optional<double> elevation;
  // Elevation copied from the nearest resolved corner rather than fitted from
  // adjacent terrain.
  bool extrapolated = false;
};

// Global tri-grid field: square cells of side `resolution`, each split by its
// diagonals into four triangles. Node id = 4 * cell + CellTriangle, with
// cell = cy * nx + cx. Corner ids enumerate the (nx+1)*(ny+1) cell vertices
// row-major, followed by one center corner per cell.
class TriGridField {
 public:
  TriGridField() = default;
  TriGridField(Vec2 origin, double resolution, int nx, int ny);

  const Vec2& origin() const noexcept { return origin_; }
  double resolution() const noexcept { return resolution_; }
  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  std::size_t cell_count() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t node_count() const noexcept { return nodes.size(); }
  std::size_t corner_count() const noexcept { return corners.size(); }

  // Node whose triangle contains `xy`. Points on a cell edge belong to the
  // lower cell, points on a diagonal to the triangle counter-clockwise of it.
  // nullopt outside the grid.
  std::optional<NodeId> locate(const Vec2& xy) const noexcept;

  // Edge-sharing triangles, ascending id.
  std::span<const NodeId> neighbors(NodeId id) const;

  // Triangles that use `corner` as one of their three corners, ascending id.
  std::vector<NodeId> nodes_at_corner(CornerId corner) const;

  // Cell coordinates of a node.
  std::pair<int, int> cell_of(NodeId id) const noexcept;
  CellTriangle triangle_of(NodeId id) const noexcept {
    return static_cast<CellTriangle>(id % 4);
  }
  CornerId vertex_corner(int i, int j) const noexcept {
    return static_cast<CornerId>(j * (nx_ + 1) + i);
  }
  CornerId center_corner(int cx, int cy) const noexcept {
    return static_cast<CornerId>((nx_ + 1) * (ny_ + 1) + cy * nx_ + cx);
  }

  // The node's three corners lifted to their elevations. Throws
  // NoResolvedCorners if any of them is unresolved.
  std::array<Point3, 3> corner_points(NodeId id) const;

  std::vector<TgfNode> nodes;
  std::vector<TgfCorner> corners;

  // Bookkeeping from construction.
  std::size_t dropped_nonfinite = 0;
  std::size_t out_of_bounds = 0;
  bool degenerate_extent = false;

 private:
  Vec2 origin_{0.0, 0.0};
  double resolution_ = 1.0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::array<NodeId, 3>> adjacency_;
  std::vector<std::uint8_t> adjacency_size_;
};

// Buckets every finite point of `cloud` into the triangle containing its xy
// projection. The grid covers the xy bounding box with whole cells aligned to
// multiples of the resolution. Non-finite points are skipped and counted.
// Throws EmptyCloud when no finite point remains.
TriGridField build_tgf(const PointCloud& cloud, const TgfConfig& config);

// Throws InvalidNodeId for ids outside the field.
std::vector<NodeId> node_neighbors(const TriGridField& tgf, NodeId id);

}  // namespace btms
