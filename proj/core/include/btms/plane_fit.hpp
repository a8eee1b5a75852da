#pragma once

#include <span>
#include <utility>

#include "btms/config.hpp"
#include "btms/tgf.hpp"
#include "btms/types.hpp"

namespace btms {

enum class FitStatus { Ok, TooFewPoints, DegenerateCovariance };

struct PlaneFit {
  FitStatus status = FitStatus::TooFewPoints;
  PlanarModel plane;
  EigenTriple eigenvalues;

  bool ok() const noexcept { return status == FitStatus::Ok; }
};

// PCA plane through the centroid; the normal is the eigenvector of the
// population covariance with the smallest eigenvalue, oriented s_z >= 0.
// Collinear or coincident input (second eigenvalue ~ 0) is degenerate.
PlaneFit try_fit_planar_model(std::span<const Point3> points);
PlaneFit try_fit_planar_model(const PointCloud& cloud, std::span<const PointIndex> subset);

// Throwing form: TooFewPoints, DegenerateCovariance.
std::pair<PlanarModel, EigenTriple> fit_planar_model(std::span<const Point3> points);

// (1 - l3/l1) * (l2 - l3)/l1, clamped to [0, 1]; 0 when l1 == 0.
double traversability_weight(const EigenTriple& eigs) noexcept;

// Terrain iff the fit succeeded, s_z >= cos(theta) and the point count
// passes the configured gate; Other otherwise.
NodeClass classify_initial(const TgfNode& node, const TgfConfig& config) noexcept;

// Fits, weighs and classifies every node of `tgf` in place.
void fit_and_classify(TriGridField& tgf, const PointCloud& cloud, const TgfConfig& config);

}  // namespace btms
