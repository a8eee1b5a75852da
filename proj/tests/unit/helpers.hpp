#pragma once

#include <random>
#include <vector>

#include "btms/tgf.hpp"
#include "btms/types.hpp"

namespace btms::test {

// Uniform grid of points on z = a*x + b*y + c with the given spacing.
inline PointCloud plane_grid(double x0, double x1, double y0, double y1, double step,
                             double a = 0.0, double b = 0.0, double c = 0.0) {
  PointCloud cloud;
  for (double y = y0; y <= y1 + 1e-12; y += step)
    for (double x = x0; x <= x1 + 1e-12; x += step) cloud.points.emplace_back(x, y, a * x + b * y + c);
  return cloud;
}

// Field whose every node carries the plane z = height(center) with a flat
// normal, marked Terrain with unit weight.
template <class Height>
TriGridField flat_field(int nx, int ny, double res, Height height) {
  TriGridField tgf(Vec2(0.0, 0.0), res, nx, ny);
  for (auto& node : tgf.nodes) {
    node.plane = make_plane(Vec3::UnitZ(), Point3(node.center.x(), node.center.y(), height(node.center)));
    node.weight = 1.0;
    node.cls = NodeClass::Terrain;
  }
  return tgf;
}

inline TriGridField flat_field(int nx, int ny, double res) {
  return flat_field(nx, ny, res, [](const Vec2&) { return 0.0; });
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(g(rng), g(rng), g(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

}  // namespace btms::test
