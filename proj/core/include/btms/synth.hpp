#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

#include "btms/eval.hpp"
#include "btms/keyvalue.hpp"
#include "btms/labeling.hpp"
#include "btms/types.hpp"

namespace btms::synth {

struct Flat {};

// amplitude * sin(2 pi x / wavelength + phase_x) * sin(2 pi y / wavelength + phase_y)
struct Bumpy {
  double amplitude = 0.3;
  double wavelength = 8.0;
  double phase_x = 0.0;
  double phase_y = 0.0;
};

// z rises along +x: tan(degrees) * x
struct Slope {
  double degrees = 10.0;
};

// Cosine bowl of the given radius and depth. Unobserved pits return no
// points inside their footprint.
struct Pit {
  Vec2 center{0.0, 0.0};
  double radius = 3.0;
  double depth = 1.0;
  bool observed = true;
};

// Horizontal slab of obstacle points `height` above the terrain over an
// axis-aligned rectangle; the ground below stays observed.
struct Overhang {
  Vec2 center{0.0, 0.0};
  Vec2 half_size{2.0, 2.0};
  double height = 2.0;
};

// Solid box standing on the terrain; the ground under it is occluded.
struct Box {
  Vec2 center{0.0, 0.0};
  Vec2 half_size{1.0, 1.0};
  double height = 1.5;
};

using Primitive = std::variant<Flat, Bumpy, Slope, Pit, Overhang, Box>;

struct Composite {
  std::vector<Primitive> parts;
};

using SceneKind = std::variant<Flat, Bumpy, Slope, Pit, Overhang, Box, Composite>;

struct SceneSpec {
  SceneKind kind = Flat{};
  double extent = 20.0;       // square side in meters, centered on the origin
  double density = 50.0;      // points per square meter
  double noise_sigma = 0.0;   // vertical Gaussian noise, meters
  std::uint64_t rng_seed = 0;
  // Obstacle points start this far above the surface, so every point within
  // the band is terrain-sampled.
  double oracle_band = 0.05;

  std::vector<Primitive> primitives() const;
  // Throws InvalidConfig.
  void validate() const;
};

// Analytic terrain height.
double surface_z(const SceneSpec& spec, const Vec2& xy);
bool in_unobserved_pit(const SceneSpec& spec, const Vec2& xy);
bool in_pit_footprint(const SceneSpec& spec, const Vec2& xy);

struct Scene {
  SceneSpec spec;
  PointCloud cloud;
  std::vector<GtClass> truth;  // Terrain for terrain-sampled points

  double surface(const Vec2& xy) const { return surface_z(spec, xy); }
  LabeledScene labeled(std::string name) const { return {std::move(name), cloud, truth}; }
};

// Deterministic for a fixed spec (including rng_seed).
Scene generate(const SceneSpec& spec);

// Copy of `spec` with every pit marked observed.
SceneSpec with_pits_observed(SceneSpec spec);

// Precision/recall/F1/accuracy of `pred` against the oracle labels.
Metrics oracle_score(std::span<const PointLabel> pred, std::span<const GtClass> oracle);
Metrics oracle_score(const SegmentationResult& result, std::span<const GtClass> oracle);

// Ten assorted composite scenes (bumps, slopes, pits, boxes, overhangs) used
// to probe parameter sensitivity.
std::vector<SceneSpec> composite_suite(std::size_t count = 10, std::uint64_t seed = 1);

// Parses a scene description:
//   extent = 40
//   density = 20
//   noise_sigma = 0.02
//   seed = 7
//   feature = bumpy amplitude=0.3 wavelength=8
//   feature = pit x=5 y=5 radius=3 depth=1 observed=false
// One feature gives that kind; several give a Composite.
SceneSpec parse_scene(const KeyValueFile& kv);
SceneSpec load_scene(const std::filesystem::path& path);
// Parses a single "kind key=value ..." feature description.
Primitive parse_feature(std::string_view text);

}  // namespace btms::synth
