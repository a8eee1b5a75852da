#pragma once

#include <span>
#include <vector>

#include "btms/config.hpp"
#include "btms/tgf.hpp"

namespace btms {

// Compactly supported sparse kernel:
//   ((2 + cos(2 pi d/l)) (1 - d/l)) / 3 + sin(2 pi d/l) / (2 pi)   for d/l < 1
//   0                                                               otherwise
// Throws NonpositiveRadius for l <= 0.
double sparse_kernel(double d, double l);

// Snapshot of one terrain node that influences a prediction target.
struct KernelContributor {
  NodeId id = 0;
  double kernel = 0.0;  // k_ij in (0, 1]
  Point3 mean;          // m_i
  Vec3 normal;          // s_i
  double weight = 0.0;  // w_i
};

struct KernelNeighborhood {
  NodeId target = 0;
  std::vector<KernelContributor> contributors;

  double mass() const noexcept;
  bool empty() const noexcept { return contributors.empty(); }
};

// Terrain nodes of `tgf` whose plane mean lies within xy-distance < l of the
// target's center. Contributors are listed by ascending id.
KernelNeighborhood gather_neighborhood(const TriGridField& tgf, NodeId target, double l);

// Kernel-weighted mean of contributor mean z. Throws EmptyNeighborhood.
double infer_z(const KernelNeighborhood& hood);

// Unit normal perpendicular to delta = m_j - m_i within the vertical plane
// that contains delta. Throws VerticalDisplacement when delta has no
// horizontal component.
Vec3 normal_from_pair(const Point3& m_i, const Point3& m_j);

struct NormalInference {
  Vec3 normal{0.0, 0.0, 1.0};
  bool fallback = false;  // weighted sum vanished; normal defaulted to +z
  std::size_t skipped = 0;  // contributors directly above/below the target
};

// Kernel-weighted average of per-contributor normals, renormalized with
// s_z >= 0. `target_mean` must already hold the inferred z.
// Throws EmptyNeighborhood when no contributor has horizontal offset.
NormalInference infer_normal(const Point3& target_mean, const KernelNeighborhood& hood);

// sum k_i w_i (s_i . s_j) / sum k_i, clamped to [0, 1]. Throws EmptyNeighborhood.
double infer_weight(const KernelNeighborhood& hood, const Vec3& target_normal);

struct CompletionStats {
  std::size_t candidates = 0;
  std::size_t completed = 0;
  std::size_t empty_neighborhood = 0;
  std::size_t below_mass = 0;
  std::size_t below_weight = 0;
  std::size_t normal_fallbacks = 0;
};

// Predicts a planar model for every Other node from the Terrain nodes present
// before the call and reverts nodes passing the mass/weight gates to
// Completed. Completed nodes never feed other predictions in the same pass.
CompletionStats complete(TriGridField& tgf, const TgfConfig& config);

}  // namespace btms
