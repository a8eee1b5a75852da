#include <benchmark/benchmark.h>

#include "btms/bgk.hpp"
#include "btms/btgs.hpp"
#include "btms/config.hpp"
#include "btms/corner_fit.hpp"
#include "btms/labeling.hpp"
#include "btms/pipeline.hpp"
#include "btms/plane_fit.hpp"
#include "btms/synth.hpp"
#include "btms/tgf.hpp"

namespace {

using namespace btms;

// 120k points over an 80 m square with a pit, boxes and an overhang.
const PointCloud& scan() {
  static const PointCloud cloud = [] {
    synth::SceneSpec spec = synth::composite_suite(1, 42).front();
    spec.extent = 80.0;
    spec.density = 120000.0 / (80.0 * 80.0);
    return synth::generate(spec).cloud;
  }();
  return cloud;
}

TgfConfig config(bool completion = true) {
  TgfConfig c = presets::single_scan();
  c.completion_enabled = completion;
  return c;
}

// Grid state right after the graph search.
TriGridField searched(const TgfConfig& c) {
  TriGridField tgf = build_tgf(scan(), c);
  fit_and_classify(tgf, scan(), c);
  traverse(tgf, select_seeds(tgf, c.seed_policy), c);
  return tgf;
}

void BM_Segment(benchmark::State& state) {
  const TgfConfig c = config(state.range(0) != 0);
  for (auto _ : state) benchmark::DoNotOptimize(segment(scan(), c));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(scan().size()));
}
BENCHMARK(BM_Segment)->Arg(1)->Arg(0)->ArgName("completion")->Unit(benchmark::kMillisecond);

void BM_BuildTgf(benchmark::State& state) {
  const TgfConfig c = config();
  for (auto _ : state) benchmark::DoNotOptimize(build_tgf(scan(), c));
}
BENCHMARK(BM_BuildTgf)->Unit(benchmark::kMillisecond);

void BM_PlaneFit(benchmark::State& state) {
  const TgfConfig c = config();
  const TriGridField base = build_tgf(scan(), c);
  for (auto _ : state) {
    state.PauseTiming();
    TriGridField tgf = base;
    state.ResumeTiming();
    fit_and_classify(tgf, scan(), c);
    benchmark::DoNotOptimize(tgf.nodes.data());
  }
}
BENCHMARK(BM_PlaneFit)->Unit(benchmark::kMillisecond);

void BM_Search(benchmark::State& state) {
  const TgfConfig c = config();
  TriGridField base = build_tgf(scan(), c);
  fit_and_classify(base, scan(), c);
  for (auto _ : state) {
    state.PauseTiming();
    TriGridField tgf = base;
    state.ResumeTiming();
    benchmark::DoNotOptimize(traverse(tgf, select_seeds(tgf, c.seed_policy), c));
  }
}
BENCHMARK(BM_Search)->Unit(benchmark::kMillisecond);

void BM_Completion(benchmark::State& state) {
  const TgfConfig c = config();
  const TriGridField base = searched(c);
  for (auto _ : state) {
    state.PauseTiming();
    TriGridField tgf = base;
    state.ResumeTiming();
    benchmark::DoNotOptimize(complete(tgf, c));
  }
}
BENCHMARK(BM_Completion)->Unit(benchmark::kMillisecond);

void BM_CornerRefit(benchmark::State& state) {
  const TgfConfig c = config();
  TriGridField base = searched(c);
  complete(base, c);
  for (auto _ : state) {
    state.PauseTiming();
    TriGridField tgf = base;
    state.ResumeTiming();
    benchmark::DoNotOptimize(resolve_corners(tgf));
    refit_planes(tgf);
  }
}
BENCHMARK(BM_CornerRefit)->Unit(benchmark::kMillisecond);

void BM_Labeling(benchmark::State& state) {
  const TgfConfig c = config();
  TriGridField tgf = searched(c);
  complete(tgf, c);
  resolve_corners(tgf);
  refit_planes(tgf);
  const LabelOptions o = label_options(c);
  for (auto _ : state) benchmark::DoNotOptimize(label_cloud(tgf, scan(), o));
}
BENCHMARK(BM_Labeling)->Unit(benchmark::kMillisecond);

void BM_SparseKernel(benchmark::State& state) {
  double d = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sparse_kernel(d, 12.0));
    d = d < 12.0 ? d + 0.01 : 0.0;
  }
}
BENCHMARK(BM_SparseKernel);

}  // namespace
BENCHMARK_MAIN();
