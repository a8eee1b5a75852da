#include "btms/plane_fit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "btms/error.hpp"

namespace btms {

namespace {

template <typename PointAt>
PlaneFit fit_impl(std::size_t n, PointAt&& point_at) {
  PlaneFit fit;
  if (n < 3) {
    fit.status = FitStatus::TooFewPoints;
    return fit;
  }

  Point3 mean = Point3::Zero();
  for (std::size_t i = 0; i < n; ++i) mean += point_at(i);
  mean /= static_cast<double>(n);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 q = point_at(i) - mean;
    cov.noalias() += q * q.transpose();
  }
  cov /= static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) {
    fit.status = FitStatus::DegenerateCovariance;
    return fit;
  }
  // Eigen returns ascending eigenvalues.
  const Vec3 ev = solver.eigenvalues();
  fit.eigenvalues.l1 = std::max(ev(2), 0.0);
  fit.eigenvalues.l2 = std::max(ev(1), 0.0);
  fit.eigenvalues.l3 = std::max(ev(0), 0.0);

  const double l1 = fit.eigenvalues.l1;
  if (!(l1 > 0.0) || fit.eigenvalues.l2 <= 1e-12 * l1) {
    fit.status = FitStatus::DegenerateCovariance;
    return fit;
  }

  fit.plane = make_plane(solver.eigenvectors().col(0), mean);
  fit.status = FitStatus::Ok;
  return fit;
}

}  // namespace

PlaneFit try_fit_planar_model(std::span<const Point3> points) {
  return fit_impl(points.size(), [&](std::size_t i) -> const Point3& { return points[i]; });
}

PlaneFit try_fit_planar_model(const PointCloud& cloud, std::span<const PointIndex> subset) {
  return fit_impl(subset.size(),
                  [&](std::size_t i) -> const Point3& { return cloud.points[subset[i]]; });
}

std::pair<PlanarModel, EigenTriple> fit_planar_model(std::span<const Point3> points) {
  const PlaneFit fit = try_fit_planar_model(points);
  switch (fit.status) {
    case FitStatus::Ok: break;
    case FitStatus::TooFewPoints:
      throw Error(ErrorCode::TooFewPoints,
                  "plane fit needs >= 3 points, got " + std::to_string(points.size()));
    case FitStatus::DegenerateCovariance:
      throw Error(ErrorCode::DegenerateCovariance, "points are collinear or coincident");
  }
  return {fit.plane, fit.eigenvalues};
}

double traversability_weight(const EigenTriple& e) noexcept {
  if (!(e.l1 > 0.0)) return 0.0;
  const double scattering = e.l3 / e.l1;
  const double planarity = (e.l2 - e.l3) / e.l1;
  return std::clamp((1.0 - scattering) * planarity, 0.0, 1.0);
}

NodeClass classify_initial(const TgfNode& node, const TgfConfig& config) noexcept {
  if (!node.plane) return NodeClass::Other;
  const double min_sz = std::cos(config.inclination_deg * M_PI / 180.0);
  const auto n = static_cast<long long>(node.point_count());
  const bool count_ok = config.point_gate == PointCountGate::AtLeast
                            ? n >= config.min_points
                            : n <= config.min_points;
  return node.plane->normal.z() >= min_sz && count_ok ? NodeClass::Terrain : NodeClass::Other;
}

void fit_and_classify(TriGridField& tgf, const PointCloud& cloud, const TgfConfig& config) {
  for (auto& node : tgf.nodes) {
    const PlaneFit fit = try_fit_planar_model(cloud, node.point_indices);
    if (fit.ok()) {
      node.plane = fit.plane;
      node.eigenvalues = fit.eigenvalues;
      node.weight = traversability_weight(fit.eigenvalues);
    } else {
      node.plane.reset();
      node.eigenvalues = fit.eigenvalues;
      node.weight = 0.0;
    }
    node.cls = classify_initial(node, config);
  }
}

}  // namespace btms
