#pragma once

#include <span>
#include <string>
#include <vector>

#include "btms/config.hpp"
#include "btms/types.hpp"

namespace btms {

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  Confusion& operator+=(const Confusion& o) noexcept {
    tp += o.tp; fp += o.fp; fn += o.fn; tn += o.tn;
    return *this;
  }
  bool operator==(const Confusion&) const = default;
};

// Ambiguous ground truth either counts as Terrain below z < -0.25 * h_s (and
// NonTerrain above), or is left out of the counts entirely.
struct AmbiguousPolicy {
  enum class Kind { IncludeWithZGate, Exclude };
  Kind kind = Kind::Exclude;
  double sensor_height = 0.0;

  static AmbiguousPolicy include_with_z_gate(double h_s) { return {Kind::IncludeWithZGate, h_s}; }
  static AmbiguousPolicy exclude() { return {Kind::Exclude, 0.0}; }
};

// Throws LengthMismatch for unaligned inputs; `z` may be empty under the
// Exclude policy.
Confusion confusion(std::span<const PointLabel> pred, std::span<const GtClass> gt,
                    const AmbiguousPolicy& policy, std::span<const double> z = {});

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

// 0/0 ratios evaluate to 0.
Metrics metrics(const Confusion& c) noexcept;

// Per-frame metric means plus F1/accuracy spread, as reported per sequence.
struct MetricSummary {
  Metrics mean;
  double f1_std = 0.0;
  double accuracy_std = 0.0;
  std::size_t frames = 0;
};

MetricSummary summarize(std::span<const Metrics> per_frame);

// Population mean and standard deviation.
double mean_of(std::span<const double> v) noexcept;
double stddev_of(std::span<const double> v) noexcept;

// "P R F1 A" in percent with one decimal.
std::string format_metrics_row(const Metrics& m);

// A cloud with two-way truth (no ambiguity), e.g. a synthetic scene.
struct LabeledScene {
  std::string name;
  PointCloud cloud;
  std::vector<GtClass> truth;
};

enum class SweepParam { Resolution, Inclination, Eps3 };

std::string_view to_string(SweepParam p) noexcept;
// Accepts r_t/resolution, theta/inclination, eps3. Throws InvalidConfig.
SweepParam parse_sweep_param(std::string_view name);
void apply_sweep_value(TgfConfig& config, SweepParam param, double value);

struct SweepOptions {
  SweepParam param = SweepParam::Resolution;
  std::vector<double> values;
  std::vector<bool> completion_modes{true, false};
  TgfConfig base;
  unsigned jobs = 1;
};

struct SweepRow {
  SweepParam param = SweepParam::Resolution;
  double value = 0.0;
  bool completion = true;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::vector<std::string> errors;
};

// One row per (value, mode), in value-major order. Each row runs segment()
// on every scene and aggregates per-scene accuracy. Failed runs are counted,
// not fatal. Throws InvalidConfig with fewer than two values.
std::vector<SweepRow> sweep(std::span<const LabeledScene> scenes, const SweepOptions& options);

// Spread of the per-value mean accuracy for one completion mode: the
// parameter sensitivity of that mode.
double sensitivity(std::span<const SweepRow> rows, bool completion);

// Comma-separated table with a header line.
std::string format_sweep_table(std::span<const SweepRow> rows);

}  // namespace btms
