#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "btms/keyvalue.hpp"
#include "btms/types.hpp"

namespace btms {

enum class SeedPolicyKind { Origin, LowestQualifying, ExplicitPoints };

struct SeedPolicy {
  SeedPolicyKind kind = SeedPolicyKind::Origin;
  std::vector<Vec2> points;  // used by ExplicitPoints

  static SeedPolicy origin() { return {SeedPolicyKind::Origin, {}}; }
  static SeedPolicy lowest_qualifying() { return {SeedPolicyKind::LowestQualifying, {}}; }
  static SeedPolicy explicit_points(std::vector<Vec2> xy) {
    return {SeedPolicyKind::ExplicitPoints, std::move(xy)};
  }
};

// How the per-node point count is compared against `min_points`. AtLeast is
// the working behavior; AtMost reproduces the inequality exactly as printed in
// the original formulation, kept for audits.
enum class PointCountGate { AtLeast, AtMost };

struct TgfConfig {
  double resolution = 4.0;         // r_t, meters
  double inclination_deg = 20.0;   // theta
  int min_points = 10;             // sigma
  double eps1 = 0.03;              // lcc displacement-angle bound, radians
  double eps2 = 0.1;               // lcc normal-agreement rate, radians per meter
  double eps3 = 0.125;             // point-to-plane threshold, meters

  // BGK kernel radius l. Unset means 3 * resolution.
  std::optional<double> kernel_radius;
  // Completion gates: a node is reverted when its kernel mass is positive and
  // >= completion_min_mass, and its inferred weight >= completion_min_weight.
  double completion_min_mass = 0.0;
  double completion_min_weight = 0.0;
  bool completion_enabled = true;

  SeedPolicy seed_policy = SeedPolicy::origin();
  PointCountGate point_gate = PointCountGate::AtLeast;
  bool two_sided_eps3 = false;
  // Label points of Other nodes against their refit plane instead of marking
  // them Obstacle outright.
  bool label_other_by_plane = false;

  double effective_kernel_radius() const noexcept {
    return kernel_radius.value_or(3.0 * resolution);
  }

  // Throws InvalidConfig on violated invariants.
  void validate() const;
};

namespace presets {
TgfConfig single_scan();
TgfConfig partial_map();
}  // namespace presets

// Looks up "single-scan" / "partial-map". Throws InvalidConfig otherwise.
TgfConfig preset_by_name(std::string_view name);

// Overlays values present in `kv` onto `base`. Recognized keys: resolution,
// inclination_deg, min_points, eps1, eps2, eps3, kernel_radius,
// completion_min_mass, completion_min_weight, completion_enabled,
// seed_policy (origin|lowest|explicit), seed_points ("x y; x y"),
// point_gate (at_least|at_most), two_sided_eps3, label_other_by_plane,
// preset. Unknown keys are rejected.
TgfConfig apply_config(const KeyValueFile& kv, TgfConfig base);

std::string describe(const TgfConfig& config);

}  // namespace btms
