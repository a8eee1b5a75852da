#include "btms/pipeline.hpp"

#include <chrono>

#include "btms/bgk.hpp"
#include "btms/btgs.hpp"
#include "btms/corner_fit.hpp"
#include "btms/error.hpp"
#include "btms/plane_fit.hpp"
#include "btms/tgf.hpp"

namespace btms {

LabelOptions label_options(const TgfConfig& config) {
  LabelOptions o;
  o.eps3 = config.eps3;
  o.two_sided = config.two_sided_eps3;
  o.other_by_plane = config.label_other_by_plane;
  return o;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

template <typename F>
auto run_stage(const char* name, double& ms, F&& f) {
  const auto t0 = Clock::now();
  try {
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      ms = elapsed_ms(t0);
    } else {
      auto r = f();
      ms = elapsed_ms(t0);
      return r;
    }
  } catch (const Error& e) {
    rethrow_with_stage(e, name);
  }
}

}  // namespace

SegmentationResult segment(const PointCloud& cloud, const TgfConfig& config) {
  try {
    config.validate();
  } catch (const Error& e) {
    rethrow_with_stage(e, "config");
  }
  const auto t_start = Clock::now();
  StageTimings timings;

  TriGridField tgf =
      run_stage("build_tgf", timings.build_ms, [&] { return build_tgf(cloud, config); });

  std::size_t initial_terrain = 0;
  run_stage("plane_fit", timings.fit_ms, [&] {
    fit_and_classify(tgf, cloud, config);
    for (const auto& n : tgf.nodes) initial_terrain += n.cls == NodeClass::Terrain;
  });

  std::size_t seed_count = 0;
  run_stage("btgs", timings.search_ms, [&] {
    const SeedSet seeds = select_seeds(tgf, config.seed_policy);
    seed_count = seeds.node_ids.size();
    traverse(tgf, seeds, config);
  });

  CompletionStats completion;
  if (config.completion_enabled) {
    completion = run_stage("bgk", timings.completion_ms, [&] { return complete(tgf, config); });
  }

  CornerStats corners = run_stage("corner_fit", timings.corners_ms, [&] {
    CornerStats s = resolve_corners(tgf);
    refit_planes(tgf);
    return s;
  });

  SegmentationResult result = run_stage("labeling", timings.labeling_ms, [&] {
    return label_points(std::move(tgf), cloud, label_options(config));
  });
  timings.total_ms = elapsed_ms(t_start);

  result.stats.initial_terrain = initial_terrain;
  result.stats.seeds = seed_count;
  result.stats.completion = completion;
  result.stats.corners = corners;
  result.stats.timings = timings;
  return result;
}

}  // namespace btms
