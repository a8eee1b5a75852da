#include "btms/tgf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "btms/error.hpp"

namespace btms {

std::size_t drop_nonfinite(PointCloud& cloud) {
  const bool labeled = cloud.has_labels();
  std::size_t kept = 0;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    if (!is_finite(cloud.points[i])) continue;
    cloud.points[kept] = cloud.points[i];
    if (labeled) cloud.labels[kept] = cloud.labels[i];
    ++kept;
  }
  const std::size_t dropped = cloud.points.size() - kept;
  cloud.points.resize(kept);
  if (labeled) cloud.labels.resize(kept);
  return dropped;
}

PlanarModel make_plane(const Vec3& normal, const Point3& mean) {
  PlanarModel plane;
  Vec3 s = normal.normalized();
  if (s.z() < 0.0) s = -s;
  plane.normal = s;
  plane.mean = mean;
  plane.offset = -s.dot(mean);
  return plane;
}

double plane_height_at(const PlanarModel& plane, const Vec2& xy) {
  const Vec3& s = plane.normal;
  if (std::abs(s.z()) <= 1e-6) {
    throw Error(ErrorCode::NearVerticalPlane, "plane normal has |s_z| <= 1e-6");
  }
  return (-plane.offset - s.x() * xy.x() - s.y() * xy.y()) / s.z();
}

TriGridField::TriGridField(Vec2 origin, double resolution, int nx, int ny)
    : origin_(std::move(origin)), resolution_(resolution), nx_(nx), ny_(ny) {
  const std::size_t ncell = cell_count();
  nodes.resize(4 * ncell);
  corners.resize(static_cast<std::size_t>(nx + 1) * (ny + 1) + ncell);
  adjacency_.resize(nodes.size());
  adjacency_size_.resize(nodes.size());

  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      corners[vertex_corner(i, j)].xy = origin_ + Vec2(i * resolution, j * resolution);
    }
  }
  for (int cy = 0; cy < ny; ++cy) {
    for (int cx = 0; cx < nx; ++cx) {
      const CornerId c = center_corner(cx, cy);
      corners[c].xy = origin_ + Vec2((cx + 0.5) * resolution, (cy + 0.5) * resolution);

      const std::array<CornerId, 4> cell_vertex = {
          vertex_corner(cx, cy), vertex_corner(cx + 1, cy),
          vertex_corner(cx + 1, cy + 1), vertex_corner(cx, cy + 1)};
      const NodeId base = static_cast<NodeId>(4 * (cy * nx + cx));
      // counter-clockwise around each triangle, starting at the apex
      const std::array<std::array<CornerId, 3>, 4> tri = {{
          {c, cell_vertex[2], cell_vertex[3]},  // North
          {c, cell_vertex[1], cell_vertex[2]},  // East
          {c, cell_vertex[0], cell_vertex[1]},  // South
          {c, cell_vertex[3], cell_vertex[0]},  // West
      }};
      for (int k = 0; k < 4; ++k) {
        TgfNode& node = nodes[base + k];
        node.id = base + k;
        node.corners = tri[k];
        node.center = (corners[tri[k][0]].xy + corners[tri[k][1]].xy + corners[tri[k][2]].xy) / 3.0;
      }
    }
  }

  for (NodeId id = 0; id < nodes.size(); ++id) {
    const auto [cx, cy] = cell_of(id);
    const int k = static_cast<int>(id % 4);
    const NodeId base = id - k;
    std::array<NodeId, 3> adj{};
    std::uint8_t n = 0;
    adj[n++] = base + (k + 1) % 4;
    adj[n++] = base + (k + 3) % 4;
    auto cross = [&](int ox, int oy, CellTriangle facing) {
      const int ax = cx + ox;
      const int ay = cy + oy;
      if (ax < 0 || ay < 0 || ax >= nx_ || ay >= ny_) return;
      adj[n++] = static_cast<NodeId>(4 * (ay * nx_ + ax) + static_cast<int>(facing));
    };
    switch (static_cast<CellTriangle>(k)) {
      case CellTriangle::North: cross(0, 1, CellTriangle::South); break;
      case CellTriangle::East: cross(1, 0, CellTriangle::West); break;
      case CellTriangle::South: cross(0, -1, CellTriangle::North); break;
      case CellTriangle::West: cross(-1, 0, CellTriangle::East); break;
    }
    std::sort(adj.begin(), adj.begin() + n);
    adjacency_[id] = adj;
    adjacency_size_[id] = n;
  }
}

std::pair<int, int> TriGridField::cell_of(NodeId id) const noexcept {
  const int cell = static_cast<int>(id / 4);
  return {cell % nx_, cell / nx_};
}

std::optional<NodeId> TriGridField::locate(const Vec2& xy) const noexcept {
  const double fx = (xy.x() - origin_.x()) / resolution_;
  const double fy = (xy.y() - origin_.y()) / resolution_;
  if (!(fx >= 0.0 && fy >= 0.0 && fx <= nx_ && fy <= ny_)) return std::nullopt;
  // ceil - 1 puts points lying exactly on a cell boundary into the lower cell,
  // which owns the lower node ids.
  const int cx = std::clamp(static_cast<int>(std::ceil(fx)) - 1, 0, nx_ - 1);
  const int cy = std::clamp(static_cast<int>(std::ceil(fy)) - 1, 0, ny_ - 1);
  const double u = xy.x() - (origin_.x() + (cx + 0.5) * resolution_);
  const double v = xy.y() - (origin_.y() + (cy + 0.5) * resolution_);
  // Half-open quarter sectors: a point on a diagonal goes to the triangle on
  // its counter-clockwise side, the apex itself to East.
  CellTriangle t;
  if (v > 0.0 && u > -v && u <= v) t = CellTriangle::North;
  else if (u < 0.0 && v <= -u && v > u) t = CellTriangle::West;
  else if (v < 0.0 && u >= v && u < -v) t = CellTriangle::South;
  else t = CellTriangle::East;
  return static_cast<NodeId>(4 * (cy * nx_ + cx) + static_cast<int>(t));
}

std::span<const NodeId> TriGridField::neighbors(NodeId id) const {
  return {adjacency_[id].data(), adjacency_size_[id]};
}

std::vector<NodeId> TriGridField::nodes_at_corner(CornerId corner) const {
  std::vector<NodeId> out;
  const auto nvertex = static_cast<CornerId>((nx_ + 1) * (ny_ + 1));
  if (corner >= nvertex) {
    const NodeId base = 4 * (corner - nvertex);
    for (NodeId k = 0; k < 4; ++k) out.push_back(base + k);
    return out;
  }
  const int i = static_cast<int>(corner % (nx_ + 1));
  const int j = static_cast<int>(corner / (nx_ + 1));
  auto add = [&](int cx, int cy, CellTriangle a, CellTriangle b) {
    if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_) return;
    const NodeId base = static_cast<NodeId>(4 * (cy * nx_ + cx));
    out.push_back(base + static_cast<NodeId>(a));
    out.push_back(base + static_cast<NodeId>(b));
  };
  add(i, j, CellTriangle::South, CellTriangle::West);          // bottom-left of cell
  add(i - 1, j, CellTriangle::East, CellTriangle::South);      // bottom-right
  add(i - 1, j - 1, CellTriangle::North, CellTriangle::East);  // top-right
  add(i, j - 1, CellTriangle::North, CellTriangle::West);      // top-left
  std::sort(out.begin(), out.end());
  return out;
}

std::array<Point3, 3> TriGridField::corner_points(NodeId id) const {
  std::array<Point3, 3> out;
  for (int m = 0; m < 3; ++m) {
    const TgfCorner& c = corners[nodes[id].corners[m]];
    if (!c.elevation) {
      throw Error(ErrorCode::NoResolvedCorners,
                  "corner " + std::to_string(nodes[id].corners[m]) + " has no elevation");
    }
    out[m] = Point3(c.xy.x(), c.xy.y(), *c.elevation);
  }
  return out;
}

TriGridField build_tgf(const PointCloud& cloud, const TgfConfig& config) {
  config.validate();
  const double r = config.resolution;

  double minx = std::numeric_limits<double>::infinity();
  double miny = minx;
  double maxx = -minx;
  double maxy = -minx;
  std::size_t finite = 0;
  for (const auto& p : cloud.points) {
    if (!is_finite(p)) continue;
    ++finite;
    minx = std::min(minx, p.x());
    miny = std::min(miny, p.y());
    maxx = std::max(maxx, p.x());
    maxy = std::max(maxy, p.y());
  }
  if (finite == 0) {
    throw Error(ErrorCode::EmptyCloud, "cloud has no finite points");
  }

  // Cells sit on the global lattice of multiples of r.
  const double ox = std::floor(minx / r) * r;
  const double oy = std::floor(miny / r) * r;
  const int nx = std::max(1, static_cast<int>(std::ceil((maxx - ox) / r)));
  const int ny = std::max(1, static_cast<int>(std::ceil((maxy - oy) / r)));
  TriGridField tgf(Vec2(ox, oy), r, nx, ny);
  tgf.dropped_nonfinite = cloud.size() - finite;
  tgf.degenerate_extent = (maxx - minx) < r && (maxy - miny) < r;

  std::vector<NodeId> owner(cloud.size(), std::numeric_limits<NodeId>::max());
  std::vector<std::size_t> count(tgf.node_count(), 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    if (!is_finite(p)) continue;
    const auto id = tgf.locate(Vec2(p.x(), p.y()));
    if (!id) {
      ++tgf.out_of_bounds;
      continue;
    }
    owner[i] = *id;
    ++count[*id];
  }
  for (std::size_t n = 0; n < tgf.node_count(); ++n) tgf.nodes[n].point_indices.reserve(count[n]);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (owner[i] != std::numeric_limits<NodeId>::max()) {
      tgf.nodes[owner[i]].point_indices.push_back(static_cast<PointIndex>(i));
    }
  }
  return tgf;
}

std::vector<NodeId> node_neighbors(const TriGridField& tgf, NodeId id) {
  if (id >= tgf.node_count()) {
    throw Error(ErrorCode::InvalidNodeId, "node id " + std::to_string(id) + " out of range");
  }
  const auto adj = tgf.neighbors(id);
  return {adj.begin(), adj.end()};
}

}  // namespace btms
