#include "btms/synth.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "btms/error.hpp"

namespace btms::synth {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kTwoPi = 2.0 * M_PI;

double pit_offset(const Pit& pit, const Vec2& xy) {
  const double r = (xy - pit.center).norm();
  if (r >= pit.radius) return 0.0;
  return -pit.depth * 0.5 * (1.0 + std::cos(M_PI * r / pit.radius));
}

bool inside_rect(const Vec2& center, const Vec2& half, const Vec2& xy) {
  return std::abs(xy.x() - center.x()) <= half.x() && std::abs(xy.y() - center.y()) <= half.y();
}

}  // namespace

std::vector<Primitive> SceneSpec::primitives() const {
  return std::visit(overloaded{
                        [](const Composite& c) { return c.parts; },
                        [](const auto& p) { return std::vector<Primitive>{Primitive(p)}; },
                    },
                    kind);
}

void SceneSpec::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(extent > 0.0)) fail("scene extent must be > 0");
  if (!(density > 0.0)) fail("scene density must be > 0");
  if (!(noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
  if (!(oracle_band >= 0.0)) fail("oracle_band must be >= 0");
  for (const auto& p : primitives()) {
    std::visit(overloaded{
                   [&](const Bumpy& b) {
                     if (!(b.wavelength > 0.0)) fail("bump wavelength must be > 0");
                   },
                   [&](const Slope& s) {
                     if (!(std::abs(s.degrees) < 89.0)) fail("slope must be below 89 degrees");
                   },
                   [&](const Pit& pit) {
                     if (!(pit.radius > 0.0)) fail("pit radius must be > 0");
                     if (!(pit.depth >= 0.0)) fail("pit depth must be >= 0");
                   },
                   [&](const Overhang& o) {
                     if (!(o.half_size.minCoeff() > 0.0)) fail("overhang size must be > 0");
                     if (!(o.height > oracle_band)) fail("overhang height must exceed the oracle band");
                   },
                   [&](const Box& b) {
                     if (!(b.half_size.minCoeff() > 0.0)) fail("box size must be > 0");
                     if (!(b.height > oracle_band)) fail("box height must exceed the oracle band");
                   },
                   [](const Flat&) {},
               },
               p);
  }
}

double surface_z(const SceneSpec& spec, const Vec2& xy) {
  double z = 0.0;
  for (const auto& p : spec.primitives()) {
    std::visit(overloaded{
                   [&](const Bumpy& b) {
                     z += b.amplitude * std::sin(kTwoPi * xy.x() / b.wavelength + b.phase_x) *
                          std::sin(kTwoPi * xy.y() / b.wavelength + b.phase_y);
                   },
                   [&](const Slope& s) { z += std::tan(s.degrees * M_PI / 180.0) * xy.x(); },
                   [&](const Pit& pit) { z += pit_offset(pit, xy); },
                   [](const auto&) {},
               },
               p);
  }
  return z;
}

bool in_pit_footprint(const SceneSpec& spec, const Vec2& xy) {
  for (const auto& p : spec.primitives()) {
    if (const auto* pit = std::get_if<Pit>(&p)) {
      if ((xy - pit->center).norm() < pit->radius) return true;
    }
  }
  return false;
}

bool in_unobserved_pit(const SceneSpec& spec, const Vec2& xy) {
  for (const auto& p : spec.primitives()) {
    if (const auto* pit = std::get_if<Pit>(&p)) {
      if (!pit->observed && (xy - pit->center).norm() < pit->radius) return true;
    }
  }
  return false;
}

Scene generate(const SceneSpec& spec) {
  spec.validate();
  Scene scene;
  scene.spec = spec;
  const auto parts = spec.primitives();

  std::mt19937_64 rng(spec.rng_seed);
  const double half = 0.5 * spec.extent;
  std::uniform_real_distribution<double> coord(-half, half);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto jitter = [&] { return spec.noise_sigma > 0.0 ? spec.noise_sigma * noise(rng) : 0.0; };
  auto count_for = [&](double area) {
    return static_cast<std::size_t>(std::llround(spec.density * area));
  };

  std::vector<const Box*> boxes;
  for (const auto& p : parts)
    if (const auto* b = std::get_if<Box>(&p)) boxes.push_back(b);

  auto push = [&](const Point3& p, GtClass c) {
    scene.cloud.points.push_back(p);
    scene.truth.push_back(c);
  };
  auto push_obstacle = [&](const Vec2& xy, double z) {
    const double floor = surface_z(spec, xy) + spec.oracle_band;
    push(Point3(xy.x(), xy.y(), std::max(z + jitter(), floor)), GtClass::NonTerrain);
  };

  const std::size_t n_ground = count_for(spec.extent * spec.extent);
  for (std::size_t i = 0; i < n_ground; ++i) {
    const Vec2 xy(coord(rng), coord(rng));
    const double z = surface_z(spec, xy) + jitter();
    if (in_unobserved_pit(spec, xy)) continue;
    bool occluded = false;
    for (const Box* b : boxes) occluded = occluded || inside_rect(b->center, b->half_size, xy);
    if (occluded) continue;
    push(Point3(xy.x(), xy.y(), z), GtClass::Terrain);
  }

  for (const auto& p : parts) {
    if (const auto* o = std::get_if<Overhang>(&p)) {
      const std::size_t n = count_for(4.0 * o->half_size.x() * o->half_size.y());
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 xy = o->center + Vec2((2.0 * unit(rng) - 1.0) * o->half_size.x(),
                                         (2.0 * unit(rng) - 1.0) * o->half_size.y());
        push_obstacle(xy, surface_z(spec, xy) + o->height);
      }
    } else if (const auto* b = std::get_if<Box>(&p)) {
      const double top = surface_z(spec, b->center) + b->height;
      const std::size_t n_top = count_for(4.0 * b->half_size.x() * b->half_size.y());
      for (std::size_t i = 0; i < n_top; ++i) {
        const Vec2 xy = b->center + Vec2((2.0 * unit(rng) - 1.0) * b->half_size.x(),
                                         (2.0 * unit(rng) - 1.0) * b->half_size.y());
        push_obstacle(xy, top);
      }
      const double hx = b->half_size.x(), hy = b->half_size.y();
      const double perimeter = 4.0 * (hx + hy);
      const std::size_t n_side = count_for(perimeter * b->height);
      for (std::size_t i = 0; i < n_side; ++i) {
        double t = unit(rng) * perimeter;
        Vec2 local;
        if (t < 2 * hx) local = Vec2(-hx + t, -hy);
        else if ((t -= 2 * hx) < 2 * hy) local = Vec2(hx, -hy + t);
        else if ((t -= 2 * hy) < 2 * hx) local = Vec2(hx - t, hy);
        else local = Vec2(-hx, hy - (t - 2 * hx));
        const Vec2 xy = b->center + local;
        const double base = surface_z(spec, xy) + spec.oracle_band;
        push_obstacle(xy, base + unit(rng) * std::max(0.0, top - base));
      }
    }
  }
  return scene;
}

SceneSpec with_pits_observed(SceneSpec spec) {
  auto mark = [](Primitive& p) {
    if (auto* pit = std::get_if<Pit>(&p)) pit->observed = true;
  };
  if (auto* c = std::get_if<Composite>(&spec.kind)) {
    for (auto& p : c->parts) mark(p);
  } else if (auto* pit = std::get_if<Pit>(&spec.kind)) {
    pit->observed = true;
  }
  return spec;
}

Metrics oracle_score(std::span<const PointLabel> pred, std::span<const GtClass> oracle) {
  return metrics(confusion(pred, oracle, AmbiguousPolicy::exclude()));
}

Metrics oracle_score(const SegmentationResult& result, std::span<const GtClass> oracle) {
  return oracle_score(result.labels, oracle);
}

std::vector<SceneSpec> composite_suite(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  // Keeps features clear of the origin, where single-scan seeding starts.
  auto place = [&](double extent, double clearance) {
    const double lim = 0.5 * extent - clearance;
    Vec2 c;
    do {
      c = Vec2(between(-lim, lim), between(-lim, lim));
    } while (c.norm() < 8.0);
    return c;
  };

  std::vector<SceneSpec> suite;
  for (std::size_t s = 0; s < count; ++s) {
    SceneSpec spec;
    spec.extent = 40.0;
    spec.density = 20.0;
    spec.noise_sigma = 0.02;
    spec.rng_seed = seed * 1000 + s;

    Composite c;
    Bumpy bumps;
    bumps.amplitude = between(0.05, 0.25);
    bumps.wavelength = between(12.0, 24.0);
    bumps.phase_x = between(0.0, kTwoPi);
    bumps.phase_y = between(0.0, kTwoPi);
    c.parts.push_back(bumps);
    c.parts.push_back(Slope{between(0.0, 12.0)});

    Pit pit;
    pit.center = place(spec.extent, 6.0);
    pit.radius = between(3.0, 5.0);
    pit.depth = between(0.8, 1.5);
    pit.observed = s % 2 == 0;
    c.parts.push_back(pit);

    const int nbox = 1 + static_cast<int>(s % 2);
    for (int b = 0; b < nbox; ++b) {
      Box box;
      box.center = place(spec.extent, 3.0);
      box.half_size = Vec2(between(0.5, 1.5), between(0.5, 1.5));
      box.height = between(1.0, 2.5);
      c.parts.push_back(box);
    }
    if (s % 3 == 0) {
      Overhang o;
      o.center = place(spec.extent, 4.0);
      o.half_size = Vec2(between(1.5, 3.0), between(1.5, 3.0));
      o.height = between(1.8, 3.0);
      c.parts.push_back(o);
    }
    spec.kind = std::move(c);
    suite.push_back(std::move(spec));
  }
  return suite;
}

Primitive parse_feature(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string kind;
  in >> kind;
  std::map<std::string, std::string> args;
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, "feature argument '" + tok + "' must be key=value");
    }
    args[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  auto num = [&](const char* key, double fallback) {
    auto it = args.find(key);
    if (it == args.end()) return fallback;
    const double v = parse_double(it->second, std::string(kind) + " " + key);
    args.erase(it);
    return v;
  };
  auto flag = [&](const char* key, bool fallback) {
    auto it = args.find(key);
    if (it == args.end()) return fallback;
    const bool v = parse_bool(it->second, std::string(kind) + " " + key);
    args.erase(it);
    return v;
  };

  Primitive out;
  if (kind == "flat") {
    out = Flat{};
  } else if (kind == "bumpy") {
    Bumpy b;
    b.amplitude = num("amplitude", b.amplitude);
    b.wavelength = num("wavelength", b.wavelength);
    b.phase_x = num("phase_x", 0.0);
    b.phase_y = num("phase_y", 0.0);
    out = b;
  } else if (kind == "slope") {
    out = Slope{num("degrees", 10.0)};
  } else if (kind == "pit") {
    Pit p;
    p.center = Vec2(num("x", 0.0), num("y", 0.0));
    p.radius = num("radius", p.radius);
    p.depth = num("depth", p.depth);
    p.observed = flag("observed", true);
    out = p;
  } else if (kind == "overhang") {
    Overhang o;
    o.center = Vec2(num("x", 0.0), num("y", 0.0));
    o.half_size = Vec2(num("hx", o.half_size.x()), num("hy", o.half_size.y()));
    o.height = num("height", o.height);
    out = o;
  } else if (kind == "box") {
    Box b;
    b.center = Vec2(num("x", 0.0), num("y", 0.0));
    b.half_size = Vec2(num("hx", b.half_size.x()), num("hy", b.half_size.y()));
    b.height = num("height", b.height);
    out = b;
  } else {
    throw Error(ErrorCode::ParseError, "unknown scene feature '" + kind + "'");
  }
  if (!args.empty()) {
    throw Error(ErrorCode::ParseError,
                "unknown argument '" + args.begin()->first + "' for feature '" + kind + "'");
  }
  return out;
}

SceneSpec parse_scene(const KeyValueFile& kv) {
  for (const auto& [key, value] : kv.entries()) {
    if (key != "extent" && key != "density" && key != "noise_sigma" && key != "seed" &&
        key != "oracle_band" && key != "feature") {
      throw Error(ErrorCode::InvalidConfig, kv.origin() + ": unknown key '" + key + "'");
    }
  }
  SceneSpec spec;
  if (auto v = kv.get_double("extent")) spec.extent = *v;
  if (auto v = kv.get_double("density")) spec.density = *v;
  if (auto v = kv.get_double("noise_sigma")) spec.noise_sigma = *v;
  if (auto v = kv.get_int("seed")) spec.rng_seed = static_cast<std::uint64_t>(*v);
  if (auto v = kv.get_double("oracle_band")) spec.oracle_band = *v;
  const auto features = kv.get_all("feature");
  if (features.size() == 1) {
    std::visit([&](const auto& p) { spec.kind = p; }, parse_feature(features.front()));
  } else if (features.size() > 1) {
    Composite c;
    for (const auto& f : features) c.parts.push_back(parse_feature(f));
    spec.kind = std::move(c);
  }
  spec.validate();
  return spec;
}

SceneSpec load_scene(const std::filesystem::path& path) {
  return parse_scene(KeyValueFile::load(path));
}

}  // namespace btms::synth
