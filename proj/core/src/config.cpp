#include "btms/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "btms/error.hpp"

namespace btms {

void TgfConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(resolution > 0.0) || !std::isfinite(resolution)) fail("resolution must be > 0");
  if (!(inclination_deg > 0.0 && inclination_deg < 90.0))
    fail("inclination_deg must lie in (0, 90)");
  if (min_points < 3) fail("min_points must be >= 3");
  if (!(eps1 > 0.0)) fail("eps1 must be > 0");
  if (!(eps2 > 0.0)) fail("eps2 must be > 0");
  if (!(eps3 > 0.0)) fail("eps3 must be > 0");
  if (kernel_radius && !(*kernel_radius > 0.0)) fail("kernel_radius must be > 0");
  if (!(completion_min_mass >= 0.0)) fail("completion_min_mass must be >= 0");
  if (!(completion_min_weight >= 0.0 && completion_min_weight <= 1.0))
    fail("completion_min_weight must lie in [0, 1]");
  if (seed_policy.kind == SeedPolicyKind::ExplicitPoints && seed_policy.points.empty())
    fail("explicit seed policy needs at least one seed point");
}

namespace presets {

TgfConfig single_scan() {
  TgfConfig c;
  c.resolution = 4.0;
  c.inclination_deg = 20.0;
  c.min_points = 10;
  c.eps1 = 0.03;
  c.eps2 = 0.1;
  c.eps3 = 0.125;
  c.seed_policy = SeedPolicy::origin();
  return c;
}

TgfConfig partial_map() {
  TgfConfig c;
  c.resolution = 2.0;
  c.inclination_deg = 20.0;
  c.min_points = 10;
  c.eps1 = 0.03;
  c.eps2 = 0.1;
  c.eps3 = 0.3;
  c.seed_policy = SeedPolicy::lowest_qualifying();
  return c;
}

}  // namespace presets

TgfConfig preset_by_name(std::string_view name) {
  if (name == "single-scan") return presets::single_scan();
  if (name == "partial-map") return presets::partial_map();
  throw Error(ErrorCode::InvalidConfig,
              "unknown preset '" + std::string(name) + "' (expected single-scan or partial-map)");
}

namespace {

std::vector<Vec2> parse_seed_points(const std::string& text) {
  std::vector<Vec2> out;
  for (const auto& pair : split(text, ';')) {
    std::istringstream in(pair);
    std::string xs, ys, extra;
    if (!(in >> xs >> ys) || (in >> extra)) {
      throw Error(ErrorCode::ParseError, "seed_points entry '" + pair + "' must be 'x y'");
    }
    out.emplace_back(parse_double(xs, "seed_points"), parse_double(ys, "seed_points"));
  }
  return out;
}

}  // namespace

TgfConfig apply_config(const KeyValueFile& kv, TgfConfig c) {
  static const std::set<std::string, std::less<>> known = {
      "preset", "resolution", "inclination_deg", "min_points", "eps1", "eps2", "eps3",
      "kernel_radius", "completion_min_mass", "completion_min_weight",
      "completion_enabled", "seed_policy", "seed_points", "point_gate",
      "two_sided_eps3", "label_other_by_plane"};
  for (const auto& [key, value] : kv.entries()) {
    if (!known.count(key)) {
      throw Error(ErrorCode::InvalidConfig, kv.origin() + ": unknown key '" + key + "'");
    }
  }

  if (auto p = kv.get("preset")) c = preset_by_name(*p);
  if (auto v = kv.get_double("resolution")) c.resolution = *v;
  if (auto v = kv.get_double("inclination_deg")) c.inclination_deg = *v;
  if (auto v = kv.get_int("min_points")) c.min_points = static_cast<int>(*v);
  if (auto v = kv.get_double("eps1")) c.eps1 = *v;
  if (auto v = kv.get_double("eps2")) c.eps2 = *v;
  if (auto v = kv.get_double("eps3")) c.eps3 = *v;
  if (auto v = kv.get("kernel_radius")) {
    if (trim(*v) == "auto") c.kernel_radius.reset();
    else c.kernel_radius = parse_double(*v, "kernel_radius");
  }
  if (auto v = kv.get_double("completion_min_mass")) c.completion_min_mass = *v;
  if (auto v = kv.get_double("completion_min_weight")) c.completion_min_weight = *v;
  if (auto v = kv.get_bool("completion_enabled")) c.completion_enabled = *v;
  if (auto v = kv.get("seed_policy")) {
    const auto s = trim(*v);
    if (s == "origin") c.seed_policy = SeedPolicy::origin();
    else if (s == "lowest") c.seed_policy = SeedPolicy::lowest_qualifying();
    else if (s == "explicit") c.seed_policy.kind = SeedPolicyKind::ExplicitPoints;
    else throw Error(ErrorCode::InvalidConfig, "unknown seed_policy '" + s + "'");
  }
  if (auto v = kv.get("seed_points")) {
    c.seed_policy.points = parse_seed_points(*v);
    if (!kv.get("seed_policy")) c.seed_policy.kind = SeedPolicyKind::ExplicitPoints;
  }
  if (auto v = kv.get("point_gate")) {
    const auto s = trim(*v);
    if (s == "at_least") c.point_gate = PointCountGate::AtLeast;
    else if (s == "at_most") c.point_gate = PointCountGate::AtMost;
    else throw Error(ErrorCode::InvalidConfig, "unknown point_gate '" + s + "'");
  }
  if (auto v = kv.get_bool("two_sided_eps3")) c.two_sided_eps3 = *v;
  if (auto v = kv.get_bool("label_other_by_plane")) c.label_other_by_plane = *v;
  c.validate();
  return c;
}

std::string describe(const TgfConfig& c) {
  std::ostringstream out;
  out << "resolution=" << c.resolution << " inclination_deg=" << c.inclination_deg
      << " min_points=" << c.min_points << " eps1=" << c.eps1 << " eps2=" << c.eps2
      << " eps3=" << c.eps3 << " kernel_radius=" << c.effective_kernel_radius()
      << " completion=" << (c.completion_enabled ? "on" : "off");
  return out.str();
}

}  // namespace btms
