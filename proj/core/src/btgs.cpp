#include "btms/btgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "btms/error.hpp"

namespace btms {

bool lcc(const PlanarModel& pi, const PlanarModel& pj, double eps1, double eps2) noexcept {
  const Vec3 d_ij = pj.mean - pi.mean;
  const double dist = d_ij.norm();
  const double normal_sim = std::abs(pi.normal.dot(pj.normal));
  if (normal_sim < 1.0 - std::sin(dist * eps2)) return false;
  const double bound = dist * std::sin(eps1);
  // d_ji = -d_ij, so |s_j . d_ji| = |s_j . d_ij|
  if (std::abs(pj.normal.dot(d_ij)) > bound) return false;
  if (std::abs(pi.normal.dot(d_ij)) > bound) return false;
  return true;
}

bool lcc(const TgfNode& node_i, const TgfNode& node_j, double eps1, double eps2) {
  if (!node_i.plane || !node_j.plane) {
    throw Error(ErrorCode::MissingPlane, "lcc between nodes " + std::to_string(node_i.id) +
                                             " and " + std::to_string(node_j.id) +
                                             " needs fitted planes");
  }
  return lcc(*node_i.plane, *node_j.plane, eps1, eps2);
}

namespace {

std::optional<NodeId> nearest_terrain(const TriGridField& tgf, const Vec2& xy) {
  std::optional<NodeId> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (const auto& node : tgf.nodes) {
    if (node.cls != NodeClass::Terrain) continue;
    const double d2 = (node.center - xy).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = node.id;
    }
  }
  return best;
}

}  // namespace

SeedSet select_seeds(const TriGridField& tgf, const SeedPolicy& policy) {
  const bool any_terrain = std::any_of(tgf.nodes.begin(), tgf.nodes.end(), [](const TgfNode& n) {
    return n.cls == NodeClass::Terrain;
  });
  if (!any_terrain) {
    throw Error(ErrorCode::NoTerrainNodes, "no node passed the initial terrain classification");
  }

  SeedSet seeds;
  switch (policy.kind) {
    case SeedPolicyKind::Origin: {
      const Vec2 origin(0.0, 0.0);
      const auto here = tgf.locate(origin);
      if (here && tgf.nodes[*here].cls == NodeClass::Terrain) {
        seeds.node_ids.push_back(*here);
      } else {
        seeds.node_ids.push_back(*nearest_terrain(tgf, origin));
      }
      break;
    }
    case SeedPolicyKind::LowestQualifying: {
      NodeId best = 0;
      double best_z = std::numeric_limits<double>::infinity();
      for (const auto& node : tgf.nodes) {
        if (node.cls != NodeClass::Terrain) continue;
        if (node.plane->mean.z() < best_z) {
          best_z = node.plane->mean.z();
          best = node.id;
        }
      }
      seeds.node_ids.push_back(best);
      break;
    }
    case SeedPolicyKind::ExplicitPoints:
      for (const auto& xy : policy.points) seeds.node_ids.push_back(*nearest_terrain(tgf, xy));
      break;
  }
  std::sort(seeds.node_ids.begin(), seeds.node_ids.end());
  seeds.node_ids.erase(std::unique(seeds.node_ids.begin(), seeds.node_ids.end()),
                       seeds.node_ids.end());
  return seeds;
}

std::vector<NodeId> traverse(TriGridField& tgf, const SeedSet& seeds, const TgfConfig& config) {
  const std::size_t n = tgf.node_count();
  std::vector<char> candidate(n, 0);
  for (std::size_t i = 0; i < n; ++i) candidate[i] = tgf.nodes[i].cls == NodeClass::Terrain;

  std::vector<char> reached(n, 0);
  std::vector<NodeId> order;
  std::deque<NodeId> frontier;
  for (NodeId s : seeds.node_ids) {
    if (s >= n) throw Error(ErrorCode::InvalidNodeId, "seed " + std::to_string(s) + " out of range");
    if (!candidate[s] || reached[s]) continue;
    reached[s] = 1;
    frontier.push_back(s);
  }

  while (!frontier.empty()) {
    const NodeId cur = frontier.front();
    frontier.pop_front();
    order.push_back(cur);
    const PlanarModel& pc = *tgf.nodes[cur].plane;
    for (NodeId nb : tgf.neighbors(cur)) {
      if (reached[nb] || !candidate[nb]) continue;
      if (!lcc(pc, *tgf.nodes[nb].plane, config.eps1, config.eps2)) continue;
      reached[nb] = 1;
      frontier.push_back(nb);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    tgf.nodes[i].cls = reached[i] ? NodeClass::Terrain : NodeClass::Other;
  }
  return order;
}

}  // namespace btms
