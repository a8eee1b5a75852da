#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "btms/config.hpp"
#include "btms/dataset_io.hpp"
#include "btms/error.hpp"
#include "btms/eval.hpp"
#include "btms/keyvalue.hpp"
#include "btms/pipeline.hpp"
#include "btms/synth.hpp"

#ifndef BTMS_DATA_DIR
#define BTMS_DATA_DIR "/usr/local/share/btms"
#endif

namespace fs = std::filesystem;
using namespace btms;

namespace {

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Input: return 2;
    case ErrorCategory::DataConsistency: return 3;
    case ErrorCategory::Internal: return 4;
  }
  return 4;
}

// Existing path as given, else looked up in $BTMS_CONFIG_DIR or the
// installed data directory (with and without a .cfg suffix).
fs::path resolve_config(const std::string& name) {
  const fs::path given(name);
  if (fs::exists(given)) return given;
  const char* env = std::getenv("BTMS_CONFIG_DIR");
  const fs::path dir = env ? fs::path(env) : fs::path(BTMS_DATA_DIR);
  for (const fs::path& candidate : {dir / name, dir / (name + ".cfg")}) {
    if (fs::exists(candidate)) return candidate;
  }
  throw Error(ErrorCode::IoError, "cannot find config '" + name + "'");
}

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  for (const auto& piece : split(text, ',')) out.push_back(parse_double(piece, "--values"));
  return out;
}

// Parameter flags shared by `segment` and `sweep`. Unset flags leave the
// config file values alone.
struct ConfigFlags {
  std::string preset;
  std::string config;
  std::optional<double> resolution, inclination, eps3, kernel_radius;
  bool no_completion = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "single-scan or partial-map")
        ->check(CLI::IsMember({"single-scan", "partial-map"}));
    cmd->add_option("--config", config, "key = value parameter file");
    cmd->add_option("--resolution", resolution, "tri-grid resolution r_t [m]");
    cmd->add_option("--inclination", inclination, "inclination threshold theta [deg]");
    cmd->add_option("--eps3", eps3, "point-to-plane threshold [m]");
    cmd->add_option("--kernel-radius", kernel_radius, "BGK kernel radius l [m]");
    cmd->add_flag("--no-completion", no_completion, "skip BGK terrain model completion");
  }

  TgfConfig build() const {
    std::optional<KeyValueFile> file;
    if (!config.empty()) file = KeyValueFile::load(resolve_config(config));

    std::string base = preset;
    if (base.empty() && file) base = file->get("preset").value_or("");
    if (base.empty()) base = "single-scan";
    TgfConfig cfg = preset_by_name(base);
    if (file) {
      std::ostringstream rest;
      for (const auto& [k, v] : file->entries())
        if (k != "preset") rest << k << " = " << v << '\n';
      cfg = apply_config(KeyValueFile::parse(rest.str(), file->origin()), cfg);
    }
    if (resolution) cfg.resolution = *resolution;
    if (inclination) cfg.inclination_deg = *inclination;
    if (eps3) cfg.eps3 = *eps3;
    if (kernel_radius) cfg.kernel_radius = *kernel_radius;
    if (no_completion) cfg.completion_enabled = false;
    cfg.validate();
    return cfg;
  }
};

io::ResultFormat parse_format(const std::string& name, const fs::path& path) {
  if (name.empty()) return io::format_for_path(path);
  if (name == "labeled-text") return io::ResultFormat::LabeledText;
  return io::ResultFormat::LabeledBinary;
}

void print_stats(const SegmentationStats& s) {
  std::cout << "points=" << s.points_total << " terrain_points=" << s.points_terrain
            << " obstacle_points=" << s.points_obstacle << " dropped_nonfinite=" << s.dropped_nonfinite
            << " out_of_bounds=" << s.out_of_bounds << " unrefit_points=" << s.unrefit_points << '\n';
  std::cout << "nodes=" << s.nodes_total << " terrain_nodes=" << s.nodes_terrain
            << " completed_nodes=" << s.nodes_completed << " other_nodes=" << s.nodes_other
            << " initial_terrain_nodes=" << s.initial_terrain << " seeds=" << s.seeds << '\n';
  std::cout << "corners_fitted=" << s.corners.fitted << " corners_extrapolated=" << s.corners.extrapolated
            << " completion_candidates=" << s.completion.candidates
            << " completion_empty=" << s.completion.empty_neighborhood
            << " degenerate_extent=" << (s.degenerate_extent ? 1 : 0) << '\n';
  const auto& t = s.timings;
  std::cout << "build_ms=" << fmt(t.build_ms) << " fit_ms=" << fmt(t.fit_ms)
            << " search_ms=" << fmt(t.search_ms) << " completion_ms=" << fmt(t.completion_ms)
            << " corners_ms=" << fmt(t.corners_ms) << " labeling_ms=" << fmt(t.labeling_ms)
            << " total_ms=" << fmt(t.total_ms) << '\n';
}

// ------------------------------------------------------------------ segment

struct SegmentArgs {
  std::string input, output, format;
  ConfigFlags flags;
};

int run_segment(const SegmentArgs& a) {
  const TgfConfig cfg = a.flags.build();
  std::size_t dropped = 0;
  const PointCloud cloud = io::read_cloud(a.input, &dropped);
  const SegmentationResult result = segment(cloud, cfg);

  fs::path out = a.output;
  if (out.empty()) {
    out = fs::path(a.input).parent_path() / (fs::path(a.input).stem().string() + "_labels.bin");
  }
  io::write_result(result, cloud, out, parse_format(a.format, out));
  std::cout << "output=" << out.string() << '\n';
  std::cout << "config " << describe(cfg) << '\n';
  print_stats(result.stats);
  if (dropped > 0) std::cout << "input_dropped_nonfinite=" << dropped << '\n';
  return 0;
}

// --------------------------------------------------------------------- eval

struct EvalArgs {
  std::string pred, gt_labels, dataset_spec, policy = "both", scan;
};

int run_eval(const EvalArgs& a) {
  const io::DatasetSpec spec = io::DatasetSpec::load(resolve_config(a.dataset_spec));

  std::vector<PointLabel> pred;
  std::vector<double> z;
  if (io::format_for_path(a.pred) == io::ResultFormat::LabeledText) {
    auto [cloud, labels] = io::read_labeled_text(a.pred);
    pred = std::move(labels);
    for (const auto& p : cloud.points) z.push_back(p.z());
  } else {
    pred = io::read_labels_binary(a.pred);
  }
  if (!a.scan.empty()) {
    z.clear();
    for (const auto& p : io::read_cloud(a.scan).points) z.push_back(p.z());
  }

  const io::GroundTruth gt = io::read_labels(a.gt_labels, spec, pred.size());
  if (gt.unknown_ids > 0) {
    std::cerr << "warning: " << gt.unknown_ids << " points carry ids missing from "
              << spec.name << "; counted as non-terrain\n";
  }

  std::vector<std::pair<std::string, AmbiguousPolicy>> policies;
  if (a.policy == "with-ambiguous" || a.policy == "both")
    policies.emplace_back("with-ambiguous", AmbiguousPolicy::include_with_z_gate(spec.sensor_height));
  if (a.policy == "without-ambiguous" || a.policy == "both")
    policies.emplace_back("without-ambiguous", AmbiguousPolicy::exclude());

  const bool several = policies.size() > 1;
  for (const auto& [name, policy] : policies) {
    if (policy.kind == AmbiguousPolicy::Kind::IncludeWithZGate && z.size() != pred.size()) {
      throw Error(ErrorCode::InvalidConfig,
                  "with-ambiguous needs per-point z: pass --scan or a labeled-text prediction");
    }
    const Metrics m = metrics(confusion(pred, gt.classes, policy, z));
    if (several) std::cout << spec.name << ' ' << name << ' ';
    std::cout << format_metrics_row(m) << '\n';
  }
  return 0;
}

// --------------------------------------------------------------- accumulate

struct AccumulateArgs {
  std::string scans_dir, labels_dir, poses, calib, out_dir, dataset_spec;
  std::size_t frames_per_map = 500;
  double voxel = 0.2;
};

std::vector<fs::path> list_files(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

int run_accumulate(const AccumulateArgs& a) {
  const auto scans = list_files(a.scans_dir, ".bin");
  if (scans.empty()) throw Error(ErrorCode::IoError, "no .bin scans in " + a.scans_dir);
  std::vector<fs::path> labels;
  if (!a.labels_dir.empty()) {
    labels = list_files(a.labels_dir, ".label");
    if (labels.size() != scans.size()) {
      throw Error(ErrorCode::SequenceLengthMismatch,
                  std::to_string(scans.size()) + " scans but " + std::to_string(labels.size()) +
                      " label files");
    }
  }
  std::optional<fs::path> calib;
  if (!a.calib.empty()) calib = a.calib;
  const auto poses = io::read_poses(a.poses, calib);
  if (poses.size() != scans.size()) {
    throw Error(ErrorCode::SequenceLengthMismatch,
                std::to_string(scans.size()) + " scans but " + std::to_string(poses.size()) + " poses");
  }
  std::optional<io::DatasetSpec> spec;
  if (!a.dataset_spec.empty()) spec = io::DatasetSpec::load(resolve_config(a.dataset_spec));

  fs::create_directories(a.out_dir);
  const auto windows = io::partial_map_windows(scans.size(), a.frames_per_map);
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto [begin, end] = windows[w];
    std::vector<PointCloud> clouds;
    for (std::size_t f = begin; f < end; ++f) {
      PointCloud c = io::read_scan_bin(scans[f]);
      if (!labels.empty()) {
        c.labels = io::read_raw_labels(labels[f]);
        if (c.labels.size() != c.size()) {
          throw Error(ErrorCode::CountMismatch, labels[f].string() + " does not match " + scans[f].string());
        }
      }
      clouds.push_back(std::move(c));
    }
    const PointCloud map = io::build_partial_map(
        clouds, std::span(poses).subspan(begin, end - begin), a.voxel, spec ? &*spec : nullptr);

    char stem[32];
    std::snprintf(stem, sizeof stem, "map_%03zu", w);
    const fs::path base = fs::path(a.out_dir) / stem;
    io::write_scan_bin(map, base.string() + ".bin");
    if (map.has_labels()) io::write_raw_labels(map.labels, base.string() + ".label");
    std::cout << stem << " frames=" << begin << "-" << end - 1 << " points=" << map.size() << '\n';
  }
  std::cout << "maps=" << windows.size() << '\n';
  return 0;
}

// -------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string param, values, modes = "on,off", output;
  std::vector<std::string> scenes;
  std::size_t suite_size = 10;
  std::uint64_t suite_seed = 1;
  unsigned jobs = 1;
  ConfigFlags flags;
};

int run_sweep(const SweepArgs& a) {
  SweepOptions opt;
  opt.param = parse_sweep_param(a.param);
  opt.values = parse_values(a.values);
  opt.base = a.flags.build();
  opt.jobs = std::max(1u, a.jobs);
  opt.completion_modes.clear();
  for (const auto& m : split(a.modes, ',')) {
    if (m == "on") opt.completion_modes.push_back(true);
    else if (m == "off") opt.completion_modes.push_back(false);
    else throw Error(ErrorCode::InvalidConfig, "unknown mode '" + m + "' (expected on/off)");
  }

  std::vector<LabeledScene> scenes;
  if (a.scenes.empty()) {
    const auto suite = synth::composite_suite(a.suite_size, a.suite_seed);
    for (std::size_t i = 0; i < suite.size(); ++i)
      scenes.push_back(synth::generate(suite[i]).labeled("suite" + std::to_string(i)));
  } else {
    for (const auto& s : a.scenes)
      scenes.push_back(synth::generate(synth::load_scene(resolve_config(s))).labeled(s));
  }

  const auto rows = sweep(scenes, opt);
  const std::string table = format_sweep_table(rows);
  if (a.output.empty()) {
    std::cout << table;
  } else {
    std::ofstream out(a.output);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + a.output);
    out << table;
    std::cout << "output=" << a.output << '\n';
  }
  std::size_t runs = 0;
  for (const auto& r : rows) {
    runs += r.runs;
    for (const auto& e : r.errors)
      std::cerr << "run failed: " << to_string(r.param) << "=" << r.value << " mode="
                << (r.completion ? "on" : "off") << " " << e << '\n';
  }
  for (bool mode : opt.completion_modes)
    std::cout << "sensitivity_" << (mode ? "on" : "off") << "=" << fmt(sensitivity(rows, mode), 5) << '\n';
  return runs > 0 ? 0 : 4;
}

// -------------------------------------------------------------------- synth

struct SynthArgs {
  std::string kind = "flat", scene, out = "scene";
  double extent = 20, density = 50, noise = 0.0;
  std::uint64_t seed = 0;
  double amplitude = 0.3, wavelength = 8, degrees = 10, radius = 3, depth = 1, height = 1.5;
  double x = 0, y = 0, hx = 1, hy = 1;
  bool observed = true;
};

int run_synth(const SynthArgs& a) {
  synth::SceneSpec spec;
  if (!a.scene.empty()) {
    spec = synth::load_scene(resolve_config(a.scene));
  } else {
    spec.extent = a.extent;
    spec.density = a.density;
    spec.noise_sigma = a.noise;
    spec.rng_seed = a.seed;
    const Vec2 c(a.x, a.y);
    if (a.kind == "flat") spec.kind = synth::Flat{};
    else if (a.kind == "bumpy") spec.kind = synth::Bumpy{a.amplitude, a.wavelength, 0.0, 0.0};
    else if (a.kind == "slope") spec.kind = synth::Slope{a.degrees};
    else if (a.kind == "pit") spec.kind = synth::Pit{c, a.radius, a.depth, a.observed};
    else if (a.kind == "overhang") spec.kind = synth::Overhang{c, Vec2(a.hx, a.hy), a.height};
    else if (a.kind == "box") spec.kind = synth::Box{c, Vec2(a.hx, a.hy), a.height};
    else throw Error(ErrorCode::InvalidConfig, "unknown scene kind '" + a.kind + "'");
  }
  const synth::Scene scene = synth::generate(spec);

  // Oracle ids follow config/synthetic.cfg: 1 terrain, 2 obstacle.
  std::vector<std::uint32_t> ids;
  std::size_t terrain = 0;
  for (GtClass c : scene.truth) {
    ids.push_back(c == GtClass::Terrain ? 1u : 2u);
    terrain += c == GtClass::Terrain;
  }
  io::write_scan_bin(scene.cloud, a.out + ".bin");
  io::write_raw_labels(ids, a.out + ".label");
  std::cout << "output=" << a.out << ".bin labels=" << a.out << ".label points=" << scene.cloud.size()
            << " terrain_points=" << terrain << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Terrain segmentation on tri-grid fields"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "btms 0.1.0");

  SegmentArgs seg;
  auto* c_seg = app.add_subcommand("segment", "label a point cloud as terrain or obstacle");
  c_seg->add_option("--input", seg.input, "scan (.bin KITTI layout or .txt)")->required();
  c_seg->add_option("--output", seg.output, "labeled result path");
  c_seg->add_option("--format", seg.format, "labeled-text or labeled-binary")
      ->check(CLI::IsMember({"labeled-text", "labeled-binary"}));
  seg.flags.add_to(c_seg);

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "precision, recall, F1 and accuracy against labels");
  c_eval->add_option("--pred", ev.pred, "segment output")->required();
  c_eval->add_option("--gt-labels", ev.gt_labels, "ground-truth .label file")->required();
  c_eval->add_option("--dataset-spec", ev.dataset_spec, "dataset label semantics")->required();
  c_eval->add_option("--policy", ev.policy, "with-ambiguous, without-ambiguous or both")
      ->check(CLI::IsMember({"with-ambiguous", "without-ambiguous", "both"}));
  c_eval->add_option("--scan", ev.scan, "scan for per-point z (binary predictions)");

  AccumulateArgs acc;
  auto* c_acc = app.add_subcommand("accumulate", "build voxelized partial maps from a sequence");
  c_acc->add_option("--scans-dir", acc.scans_dir)->required();
  c_acc->add_option("--labels-dir", acc.labels_dir);
  c_acc->add_option("--poses", acc.poses)->required();
  c_acc->add_option("--calib", acc.calib);
  c_acc->add_option("--frames-per-map", acc.frames_per_map)->check(CLI::PositiveNumber);
  c_acc->add_option("--voxel", acc.voxel, "voxel size [m]")->check(CLI::PositiveNumber);
  c_acc->add_option("--dataset-spec", acc.dataset_spec, "label semantics for voxel majority");
  c_acc->add_option("--out-dir", acc.out_dir)->required();

  SweepArgs sw;
  auto* c_sweep = app.add_subcommand("sweep", "parameter sensitivity over synthetic scenes");
  c_sweep->add_option("--param", sw.param, "r_t, theta or eps3")->required();
  c_sweep->add_option("--values", sw.values, "comma-separated values")->required();
  c_sweep->add_option("--modes", sw.modes, "completion modes: on,off");
  c_sweep->add_option("--scene", sw.scenes, "scene description files (default: built-in suite)");
  c_sweep->add_option("--suite-size", sw.suite_size);
  c_sweep->add_option("--suite-seed", sw.suite_seed);
  c_sweep->add_option("--jobs", sw.jobs, "worker threads")->check(CLI::PositiveNumber);
  c_sweep->add_option("--output", sw.output, "write the table here instead of stdout");
  sw.flags.add_to(c_sweep);

  SynthArgs sy;
  auto* c_synth = app.add_subcommand("synth", "write a synthetic scene with oracle labels");
  c_synth->add_option("--kind", sy.kind)
      ->check(CLI::IsMember({"flat", "bumpy", "slope", "pit", "overhang", "box"}));
  c_synth->add_option("--scene", sy.scene, "scene description file");
  c_synth->add_option("--out", sy.out, "output prefix for .bin and .label");
  c_synth->add_option("--extent", sy.extent);
  c_synth->add_option("--density", sy.density);
  c_synth->add_option("--noise", sy.noise);
  c_synth->add_option("--seed", sy.seed);
  c_synth->add_option("--amplitude", sy.amplitude);
  c_synth->add_option("--wavelength", sy.wavelength);
  c_synth->add_option("--degrees", sy.degrees);
  c_synth->add_option("--radius", sy.radius);
  c_synth->add_option("--depth", sy.depth);
  c_synth->add_option("--height", sy.height);
  c_synth->add_option("--x", sy.x);
  c_synth->add_option("--y", sy.y);
  c_synth->add_option("--hx", sy.hx);
  c_synth->add_option("--hy", sy.hy);
  c_synth->add_option("--observed", sy.observed, "pit returns inside the footprint (true/false)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (c_seg->parsed()) return run_segment(seg);
    if (c_eval->parsed()) return run_eval(ev);
    if (c_acc->parsed()) return run_accumulate(acc);
    if (c_sweep->parsed()) return run_sweep(sw);
    if (c_synth->parsed()) return run_synth(sy);
  } catch (const Error& e) {
    std::cerr << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code(category_of(e.code()));
  } catch (const std::exception& e) {
    std::cerr << "InternalError: " << e.what() << '\n';
    return 4;
  }
  return 4;
}
