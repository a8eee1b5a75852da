#include "btms/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "btms/error.hpp"
#include "btms/pipeline.hpp"

namespace btms {

Confusion confusion(std::span<const PointLabel> pred, std::span<const GtClass> gt,
                    const AmbiguousPolicy& policy, std::span<const double> z) {
  if (pred.size() != gt.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(pred.size()) + " predictions for " +
                                               std::to_string(gt.size()) + " labels");
  }
  const bool gated = policy.kind == AmbiguousPolicy::Kind::IncludeWithZGate;
  if (gated && z.size() != gt.size()) {
    throw Error(ErrorCode::LengthMismatch, "z-gated policy needs one z per point");
  }
  if (gated && !(policy.sensor_height > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "sensor height must be > 0");
  }
  const double gate = -0.25 * policy.sensor_height;

  Confusion c;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    bool truth_terrain;
    switch (gt[i]) {
      case GtClass::Terrain: truth_terrain = true; break;
      case GtClass::NonTerrain: truth_terrain = false; break;
      case GtClass::Ambiguous:
        if (!gated) continue;
        truth_terrain = z[i] < gate;
        break;
      default: continue;
    }
    const bool pred_terrain = pred[i] == PointLabel::Terrain;
    if (pred_terrain && truth_terrain) ++c.tp;
    else if (pred_terrain) ++c.fp;
    else if (truth_terrain) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Metrics metrics(const Confusion& c) noexcept {
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  Metrics m;
  m.precision = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fp));
  m.recall = ratio(static_cast<double>(c.tp), static_cast<double>(c.tp + c.fn));
  m.f1 = ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
  m.accuracy = ratio(static_cast<double>(c.tp + c.tn), static_cast<double>(c.total()));
  return m;
}

double mean_of(std::span<const double> v) noexcept {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(std::span<const double> v) noexcept {
  if (v.empty()) return 0.0;
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size()));
}

MetricSummary summarize(std::span<const Metrics> per_frame) {
  MetricSummary s;
  s.frames = per_frame.size();
  std::vector<double> p, r, f, a;
  for (const auto& m : per_frame) {
    p.push_back(m.precision);
    r.push_back(m.recall);
    f.push_back(m.f1);
    a.push_back(m.accuracy);
  }
  s.mean = {mean_of(p), mean_of(r), mean_of(f), mean_of(a)};
  s.f1_std = stddev_of(f);
  s.accuracy_std = stddev_of(a);
  return s;
}

std::string format_metrics_row(const Metrics& m) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.1f %.1f %.1f %.1f", 100.0 * m.precision, 100.0 * m.recall,
                100.0 * m.f1, 100.0 * m.accuracy);
  return buf;
}

std::string_view to_string(SweepParam p) noexcept {
  switch (p) {
    case SweepParam::Resolution: return "r_t";
    case SweepParam::Inclination: return "theta";
    case SweepParam::Eps3: return "eps3";
  }
  return "?";
}

SweepParam parse_sweep_param(std::string_view name) {
  if (name == "r_t" || name == "resolution") return SweepParam::Resolution;
  if (name == "theta" || name == "inclination" || name == "inclination_deg")
    return SweepParam::Inclination;
  if (name == "eps3") return SweepParam::Eps3;
  throw Error(ErrorCode::InvalidConfig,
              "unknown sweep parameter '" + std::string(name) + "' (r_t, theta, eps3)");
}

void apply_sweep_value(TgfConfig& config, SweepParam param, double value) {
  switch (param) {
    case SweepParam::Resolution: config.resolution = value; break;
    case SweepParam::Inclination: config.inclination_deg = value; break;
    case SweepParam::Eps3: config.eps3 = value; break;
  }
}

std::vector<SweepRow> sweep(std::span<const LabeledScene> scenes, const SweepOptions& options) {
  if (options.values.size() < 2) {
    throw Error(ErrorCode::InvalidConfig, "a sweep needs at least two parameter values");
  }
  if (options.completion_modes.empty()) {
    throw Error(ErrorCode::InvalidConfig, "a sweep needs at least one completion mode");
  }
  if (scenes.empty()) throw Error(ErrorCode::InvalidConfig, "a sweep needs at least one scene");

  struct Job {
    std::size_t row;
    std::size_t scene;
  };
  std::vector<SweepRow> rows;
  std::vector<TgfConfig> configs;
  for (double v : options.values) {
    for (bool mode : options.completion_modes) {
      SweepRow row;
      row.param = options.param;
      row.value = v;
      row.completion = mode;
      rows.push_back(row);
      TgfConfig cfg = options.base;
      apply_sweep_value(cfg, options.param, v);
      cfg.completion_enabled = mode;
      configs.push_back(cfg);
    }
  }
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t s = 0; s < scenes.size(); ++s) jobs.push_back({r, s});

  // Per-job outcome slots keep the reduction independent of thread timing.
  std::vector<double> accuracy(jobs.size(), 0.0);
  std::vector<std::string> error(jobs.size());
  std::vector<char> ok(jobs.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const auto& scene = scenes[jobs[j].scene];
      try {
        const auto result = segment(scene.cloud, configs[jobs[j].row]);
        accuracy[j] = metrics(confusion(result.labels, scene.truth, AmbiguousPolicy::exclude())).accuracy;
        ok[j] = 1;
      } catch (const Error& e) {
        error[j] = scene.name + ": " + std::string(to_string(e.code())) + ": " + e.what();
      } catch (const std::exception& e) {
        error[j] = scene.name + ": " + e.what();
      }
    }
  };
  const unsigned nthreads = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(jobs.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<std::vector<double>> per_row(rows.size());
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    SweepRow& row = rows[jobs[j].row];
    if (ok[j]) {
      per_row[jobs[j].row].push_back(accuracy[j]);
      ++row.runs;
    } else {
      ++row.failures;
      row.errors.push_back(error[j]);
    }
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    rows[r].mean_accuracy = mean_of(per_row[r]);
    rows[r].std_accuracy = stddev_of(per_row[r]);
  }
  return rows;
}

double sensitivity(std::span<const SweepRow> rows, bool completion) {
  std::vector<double> means;
  for (const auto& r : rows) {
    if (r.completion == completion && r.runs > 0) means.push_back(r.mean_accuracy);
  }
  return stddev_of(means);
}

std::string format_sweep_table(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "param,value,mode,mean_accuracy,std_accuracy,runs,failures\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%g,%s,%.6f,%.6f,%zu,%zu\n",
                  std::string(to_string(r.param)).c_str(), r.value, r.completion ? "on" : "off",
                  r.mean_accuracy, r.std_accuracy, r.runs, r.failures);
    out << buf;
  }
  return out.str();
}

}  // namespace btms
