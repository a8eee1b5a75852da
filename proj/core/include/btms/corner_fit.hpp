#pragma once

#include <array>
#include <optional>

#include "btms/tgf.hpp"

namespace btms {

// Weighted mean, over adjacent Terrain/Completed nodes with a non-vertical
// plane, of each plane's height at the corner; weights are the nodes'
// traversability weights (equal weights when they all vanish). nullopt when no
// adjacent node qualifies.
std::optional<double> corner_elevation(const TriGridField& tgf, CornerId corner);

struct CornerStats {
  std::size_t fitted = 0;
  std::size_t extrapolated = 0;
  std::size_t equal_weight = 0;
};

// Sets every corner elevation: fitted corners from corner_elevation, the rest
// copied from the nearest fitted corner (xy distance, lowest id on ties).
// Throws NoResolvedCorners when no corner can be fitted.
CornerStats resolve_corners(TriGridField& tgf);

// Plane through three points: mean of the corners, normal from the cross
// product of the unit edge vectors (oriented s_z >= 0). Throws
// DegenerateCorners for collinear input.
PlanarModel plane_through_corners(const std::array<Point3, 3>& corners);

// Replaces every node plane with the plane through its resolved corners.
// Weights and classes are preserved.
void refit_planes(TriGridField& tgf);

}  // namespace btms
