#include "btms/corner_fit.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "btms/error.hpp"

namespace btms {

namespace {

bool contributes(const TgfNode& node) {
  return (node.cls == NodeClass::Terrain || node.cls == NodeClass::Completed) && node.plane &&
         std::abs(node.plane->normal.z()) > 1e-6;
}

// Fitted value and whether the weights all vanished.
std::optional<std::pair<double, bool>> weighted_height(const TriGridField& tgf, CornerId corner) {
  const Vec2& xy = tgf.corners[corner].xy;
  double num = 0.0, den = 0.0, plain = 0.0;
  int count = 0;
  for (NodeId id : tgf.nodes_at_corner(corner)) {
    const TgfNode& node = tgf.nodes[id];
    if (!contributes(node)) continue;
    const double z = plane_height_at(*node.plane, xy);
    num += node.weight * z;
    den += node.weight;
    plain += z;
    ++count;
  }
  if (count == 0) return std::nullopt;
  if (den > 0.0) return std::make_pair(num / den, false);
  return std::make_pair(plain / count, true);
}

}  // namespace

std::optional<double> corner_elevation(const TriGridField& tgf, CornerId corner) {
  if (corner >= tgf.corner_count()) {
    throw Error(ErrorCode::InvalidNodeId, "corner id " + std::to_string(corner) + " out of range");
  }
  auto r = weighted_height(tgf, corner);
  if (!r) return std::nullopt;
  return r->first;
}

CornerStats resolve_corners(TriGridField& tgf) {
  CornerStats stats;
  const int nx = tgf.nx();
  const int ny = tgf.ny();
  const auto nvertex = static_cast<CornerId>((nx + 1) * (ny + 1));

  auto home_cell = [&](CornerId c) -> std::pair<int, int> {
    if (c >= nvertex) {
      const int cell = static_cast<int>(c - nvertex);
      return {cell % nx, cell / nx};
    }
    const int i = static_cast<int>(c % (nx + 1));
    const int j = static_cast<int>(c / (nx + 1));
    return {std::min(i, nx - 1), std::min(j, ny - 1)};
  };

  std::vector<std::vector<CornerId>> fitted_by_cell(tgf.cell_count());
  std::vector<CornerId> unresolved;
  for (CornerId c = 0; c < tgf.corner_count(); ++c) {
    TgfCorner& corner = tgf.corners[c];
    corner.extrapolated = false;
    auto r = weighted_height(tgf, c);
    if (r) {
      corner.elevation = r->first;
      if (r->second) ++stats.equal_weight;
      ++stats.fitted;
      const auto [a, b] = home_cell(c);
      fitted_by_cell[b * nx + a].push_back(c);
    } else {
      corner.elevation.reset();
      unresolved.push_back(c);
    }
  }
  if (stats.fitted == 0) {
    throw Error(ErrorCode::NoResolvedCorners, "no corner is adjacent to a terrain node");
  }

  // Ring search over home cells: a corner homed D rings away is at least
  // (D - 1) * r from the query, so ring R can stop once best < R * r.
  const double r = tgf.resolution();
  const int max_ring = std::max(nx, ny);
  for (CornerId c : unresolved) {
    const Vec2& q = tgf.corners[c].xy;
    const auto [qa, qb] = home_cell(c);
    double best_d2 = std::numeric_limits<double>::infinity();
    CornerId best = 0;
    for (int ring = 0; ring <= max_ring; ++ring) {
      for (int b = qb - ring; b <= qb + ring; ++b) {
        if (b < 0 || b >= ny) continue;
        const bool edge_row = (b == qb - ring || b == qb + ring);
        const int step = edge_row ? 1 : 2 * ring;
        for (int a = qa - ring; a <= qa + ring; a += std::max(step, 1)) {
          if (a < 0 || a >= nx) continue;
          for (CornerId f : fitted_by_cell[b * nx + a]) {
            const double d2 = (tgf.corners[f].xy - q).squaredNorm();
            if (d2 < best_d2 || (d2 == best_d2 && f < best)) {
              best_d2 = d2;
              best = f;
            }
          }
        }
      }
      const double bound = ring * r;
      if (best_d2 < bound * bound) break;
    }
    tgf.corners[c].elevation = tgf.corners[best].elevation;
    tgf.corners[c].extrapolated = true;
    ++stats.extrapolated;
  }
  return stats;
}

PlanarModel plane_through_corners(const std::array<Point3, 3>& c) {
  const Vec3 e1 = c[1] - c[0];
  const Vec3 e2 = c[2] - c[0];
  const double n1 = e1.norm();
  const double n2 = e2.norm();
  if (!(n1 > 0.0) || !(n2 > 0.0)) {
    throw Error(ErrorCode::DegenerateCorners, "coincident triangle corners");
  }
  const Vec3 cross = (e1 / n1).cross(e2 / n2);
  if (!(cross.norm() > 1e-12)) {
    throw Error(ErrorCode::DegenerateCorners, "collinear triangle corners");
  }
  return make_plane(cross, (c[0] + c[1] + c[2]) / 3.0);
}

void refit_planes(TriGridField& tgf) {
  for (auto& node : tgf.nodes) {
    node.plane = plane_through_corners(tgf.corner_points(node.id));
  }
}

}  // namespace btms
