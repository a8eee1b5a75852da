#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "btms/keyvalue.hpp"
#include "btms/labeling.hpp"
#include "btms/types.hpp"

namespace btms::io {

// Rigid transform p -> R p + t.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3 translation = Vec3::Zero();

  Point3 apply(const Point3& p) const { return rotation * p + translation; }
  Pose inverse() const;
  Pose operator*(const Pose& rhs) const;

  // Throws ParseError unless |det(R) - 1| <= det_tolerance after
  // projecting R onto the nearest rotation.
  static Pose from_row_major(std::span<const double, 12> values, double det_tolerance = 1e-3);
};

// Dataset label semantics read from a key-value file:
//   name = semantickitti
//   sensor_height = 1.73
//   terrain_labels = road, parking, ...
//   ambiguous_labels = vegetation
//   label.road = 40
struct DatasetSpec {
  std::string name;
  std::set<std::string> terrain_labels;
  std::set<std::string> ambiguous_labels;
  double sensor_height = 1.0;
  std::map<std::string, std::uint32_t> label_ids;

  // Throws InvalidConfig on inconsistent sets or non-positive height.
  void validate() const;
  // nullopt for ids missing from the map.
  std::optional<GtClass> classify(std::uint32_t id) const;
  std::map<std::uint32_t, GtClass> class_table() const;

  static DatasetSpec load(const std::filesystem::path& path);
  static DatasetSpec from_keyvalue(const KeyValueFile& kv);
};

// KITTI velodyne layout: little-endian float32 x, y, z, intensity per point.
// Intensity is dropped and non-finite points are filtered; `dropped`
// receives their count. Throws IoError, MalformedFile.
PointCloud read_scan_bin(const std::filesystem::path& path, std::size_t* dropped = nullptr);
void write_scan_bin(const PointCloud& cloud, const std::filesystem::path& path);

// Label file: little-endian uint32 per point, semantic id in the low 16 bits.
std::vector<std::uint32_t> read_raw_labels(const std::filesystem::path& path);
void write_raw_labels(std::span<const std::uint32_t> ids, const std::filesystem::path& path);

struct GroundTruth {
  std::vector<GtClass> classes;
  std::size_t unknown_ids = 0;  // unmapped ids, counted as NonTerrain
};

GroundTruth classify_labels(std::span<const std::uint32_t> ids, const DatasetSpec& spec);
// Throws CountMismatch when `expected_count` is given and differs.
GroundTruth read_labels(const std::filesystem::path& path, const DatasetSpec& spec,
                        std::optional<std::size_t> expected_count = std::nullopt);

// Reads "Tr:" (velodyne to camera) from a KITTI calib.txt.
Pose read_calibration(const std::filesystem::path& path);
// 12 floats per line, row-major 3x4. With a calibration Tr each pose becomes
// Tr^-1 * P * Tr. Throws ParseError naming the line.
std::vector<Pose> read_poses(const std::filesystem::path& path,
                             const std::optional<std::filesystem::path>& calib = std::nullopt);

// One centroid per occupied voxel of side `resolution`, emitted in voxel-key
// order. With labels, the voxel keeps the majority ground-truth class (ties:
// Terrain, then Ambiguous) and the most frequent raw id of that class; without
// a spec the most frequent raw id wins (lowest id on ties).
PointCloud voxel_downsample(const PointCloud& cloud, double resolution,
                            const DatasetSpec* spec = nullptr);

// Disjoint consecutive [begin, end) windows of `frames_per_map` frames; the
// trailing partial window is kept.
std::vector<std::pair<std::size_t, std::size_t>> partial_map_windows(std::size_t frames,
                                                                     std::size_t frames_per_map);

// Transforms scans into the map frame, concatenates and voxelizes them.
PointCloud build_partial_map(std::span<const PointCloud> scans, std::span<const Pose> poses,
                             double resolution, const DatasetSpec* spec = nullptr);

// Throws SequenceLengthMismatch when scans and poses differ in length.
std::vector<PointCloud> accumulate_partial_map(std::span<const PointCloud> scans,
                                               std::span<const Pose> poses,
                                               std::size_t frames_per_map, double resolution,
                                               const DatasetSpec* spec = nullptr);

enum class ResultFormat { LabeledText, LabeledBinary };

// labeled-text: "x y z label" per point, label 1 = Terrain, 0 = Obstacle,
// coordinates in shortest round-trip form. labeled-binary: one byte per
// point in input order. Throws IoError.
void write_result(const SegmentationResult& result, const PointCloud& cloud,
                  const std::filesystem::path& path, ResultFormat format);
void write_labels(std::span<const PointLabel> labels, const PointCloud& cloud,
                  const std::filesystem::path& path, ResultFormat format);

std::vector<PointLabel> read_labels_binary(const std::filesystem::path& path);
// Returns the cloud and its labels.
std::pair<PointCloud, std::vector<PointLabel>> read_labeled_text(const std::filesystem::path& path);

// Picks LabeledText for .txt, LabeledBinary otherwise.
ResultFormat format_for_path(const std::filesystem::path& path);

// Reads a cloud from .bin (KITTI) or .txt ("x y z [label]" lines).
PointCloud read_cloud(const std::filesystem::path& path, std::size_t* dropped = nullptr);

}  // namespace btms::io
