#pragma once

#include <vector>

#include "btms/config.hpp"
#include "btms/tgf.hpp"

namespace btms {

struct SeedSet {
  std::vector<NodeId> node_ids;  // sorted, unique
};

// Local convexity/concavity test between two fitted node planes.
// Throws MissingPlane if either node is unfitted.
bool lcc(const TgfNode& node_i, const TgfNode& node_j, double eps1, double eps2);
bool lcc(const PlanarModel& plane_i, const PlanarModel& plane_j, double eps1, double eps2) noexcept;

// Throws NoTerrainNodes when no node is classified Terrain.
SeedSet select_seeds(const TriGridField& tgf, const SeedPolicy& policy);

// Breadth-first search from `seeds` across edges joining two initially
// Terrain nodes whose planes pass lcc. Reached nodes stay Terrain; every
// other node becomes Other. Returns the reached node ids in visit order.
std::vector<NodeId> traverse(TriGridField& tgf, const SeedSet& seeds, const TgfConfig& config);

}  // namespace btms
