#include "btms/bgk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "btms/error.hpp"

namespace btms {

double sparse_kernel(double d, double l) {
  if (!(l > 0.0)) throw Error(ErrorCode::NonpositiveRadius, "kernel radius must be > 0");
  const double r = d / l;
  if (!(r < 1.0)) return 0.0;
  constexpr double two_pi = 2.0 * M_PI;
  const double k = ((2.0 + std::cos(two_pi * r)) * (1.0 - r)) / 3.0 + std::sin(two_pi * r) / two_pi;
  // Rounding leaves tiny negatives just inside the support.
  return std::max(k, 0.0);
}

double KernelNeighborhood::mass() const noexcept {
  double m = 0.0;
  for (const auto& c : contributors) m += c.kernel;
  return m;
}

KernelNeighborhood gather_neighborhood(const TriGridField& tgf, NodeId target, double l) {
  if (target >= tgf.node_count()) {
    throw Error(ErrorCode::InvalidNodeId, "node id " + std::to_string(target) + " out of range");
  }
  KernelNeighborhood hood;
  hood.target = target;
  const Vec2& xj = tgf.nodes[target].center;
  const auto [cx, cy] = tgf.cell_of(target);
  const int reach = static_cast<int>(std::ceil(l / tgf.resolution()));
  const int x0 = std::max(0, cx - reach), x1 = std::min(tgf.nx() - 1, cx + reach);
  const int y0 = std::max(0, cy - reach), y1 = std::min(tgf.ny() - 1, cy + reach);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const NodeId base = static_cast<NodeId>(4 * (y * tgf.nx() + x));
      for (NodeId k = 0; k < 4; ++k) {
        const TgfNode& node = tgf.nodes[base + k];
        if (node.cls != NodeClass::Terrain || !node.plane) continue;
        const double d = (node.plane->mean.head<2>() - xj).norm();
        const double k_ij = sparse_kernel(d, l);
        if (!(k_ij > 0.0)) continue;
        hood.contributors.push_back(
            {node.id, k_ij, node.plane->mean, node.plane->normal, node.weight});
      }
    }
  }
  return hood;
}

namespace {

void require_nonempty(const KernelNeighborhood& hood, const char* what) {
  if (hood.empty() || !(hood.mass() > 0.0)) {
    throw Error(ErrorCode::EmptyNeighborhood,
                std::string(what) + ": node " + std::to_string(hood.target) +
                    " has no contributing terrain within the kernel radius");
  }
}

}  // namespace

double infer_z(const KernelNeighborhood& hood) {
  require_nonempty(hood, "infer_z");
  double num = 0.0;
  double den = 0.0;
  for (const auto& c : hood.contributors) {
    num += c.kernel * c.mean.z();
    den += c.kernel;
  }
  return num / den;
}

Vec3 normal_from_pair(const Point3& m_i, const Point3& m_j) {
  const Vec3 delta = m_j - m_i;
  const double horiz = std::hypot(delta.x(), delta.y());
  if (!(horiz > 0.0)) {
    throw Error(ErrorCode::VerticalDisplacement, "displacement has no horizontal component");
  }
  const double len = delta.norm();
  return Vec3(-delta.x() * delta.z() / horiz, -delta.y() * delta.z() / horiz, horiz) / len;
}

NormalInference infer_normal(const Point3& target_mean, const KernelNeighborhood& hood) {
  NormalInference out;
  Vec3 sum = Vec3::Zero();
  double den = 0.0;
  for (const auto& c : hood.contributors) {
    const Vec3 delta = target_mean - c.mean;
    if (!(std::hypot(delta.x(), delta.y()) > 0.0)) {
      ++out.skipped;
      continue;
    }
    sum += c.kernel * normal_from_pair(c.mean, target_mean);
    den += c.kernel;
  }
  if (!(den > 0.0)) {
    throw Error(ErrorCode::EmptyNeighborhood,
                "infer_normal: node " + std::to_string(hood.target) +
                    " has no contributor with horizontal offset");
  }
  sum /= den;
  const double norm = sum.norm();
  if (!(norm > 1e-12)) {
    out.normal = Vec3(0.0, 0.0, 1.0);
    out.fallback = true;
    return out;
  }
  out.normal = sum / norm;
  if (out.normal.z() < 0.0) out.normal = -out.normal;
  return out;
}

double infer_weight(const KernelNeighborhood& hood, const Vec3& target_normal) {
  require_nonempty(hood, "infer_weight");
  double num = 0.0;
  double den = 0.0;
  for (const auto& c : hood.contributors) {
    num += c.kernel * c.weight * c.normal.dot(target_normal);
    den += c.kernel;
  }
  return std::clamp(num / den, 0.0, 1.0);
}

CompletionStats complete(TriGridField& tgf, const TgfConfig& config) {
  const double l = config.effective_kernel_radius();
  CompletionStats stats;

  struct Prediction {
    NodeId id;
    PlanarModel plane;
    double weight;
  };
  std::vector<Prediction> accepted;

  // All neighborhoods read the pre-pass Terrain set; updates are applied
  // afterwards so the result does not depend on visiting order.
  for (const auto& node : tgf.nodes) {
    if (node.cls != NodeClass::Other) continue;
    ++stats.candidates;
    const KernelNeighborhood hood = gather_neighborhood(tgf, node.id, l);
    const double mass = hood.mass();
    if (hood.empty() || !(mass > 0.0)) {
      ++stats.empty_neighborhood;
      continue;
    }
    if (mass < config.completion_min_mass) {
      ++stats.below_mass;
      continue;
    }

    const double z = infer_z(hood);
    const Point3 mean(node.center.x(), node.center.y(), z);
    NormalInference normal;
    try {
      normal = infer_normal(mean, hood);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyNeighborhood) throw;
      ++stats.empty_neighborhood;
      continue;
    }
    if (normal.fallback) ++stats.normal_fallbacks;
    const double w = infer_weight(hood, normal.normal);
    if (w < config.completion_min_weight) {
      ++stats.below_weight;
      continue;
    }
    accepted.push_back({node.id, make_plane(normal.normal, mean), w});
  }

  for (const auto& p : accepted) {
    TgfNode& node = tgf.nodes[p.id];
    node.plane = p.plane;
    node.weight = p.weight;
    node.cls = NodeClass::Completed;
  }
  stats.completed = accepted.size();
  return stats;
}

}  // namespace btms
