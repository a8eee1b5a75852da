#include "btms/dataset_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "btms/error.hpp"

namespace btms::io {

namespace fs = std::filesystem;

namespace {

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "read failed for " + path.string());
  return ss.str();
}

std::ofstream open_out(const fs::path& path, bool binary) {
  if (path.has_parent_path() && !fs::exists(path.parent_path())) {
    throw Error(ErrorCode::IoError, "directory does not exist: " + path.parent_path().string());
  }
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    v = std::bit_cast<T>(bytes);
  }
  return v;
}

template <typename T>
void store_le(std::string& buf, T v) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  buf.append(bytes.data(), bytes.size());
}

void append_double(std::string& buf, double v) {
  char tmp[32];
  auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
  buf.append(tmp, ptr);
}

}  // namespace

// ---------------------------------------------------------------- poses

Pose Pose::inverse() const {
  Pose inv;
  inv.rotation = rotation.transpose();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

Pose Pose::operator*(const Pose& rhs) const {
  Pose out;
  out.rotation = rotation * rhs.rotation;
  out.translation = rotation * rhs.translation + translation;
  return out;
}

Pose Pose::from_row_major(std::span<const double, 12> v, double det_tolerance) {
  Eigen::Matrix3d r;
  r << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
  const double det = r.determinant();
  if (!(std::abs(det - 1.0) <= det_tolerance)) {
    throw Error(ErrorCode::ParseError, "rotation block has determinant " + std::to_string(det));
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Pose pose;
  pose.rotation = svd.matrixU() * svd.matrixV().transpose();
  pose.translation = Vec3(v[3], v[7], v[11]);
  return pose;
}

namespace {

std::array<double, 12> parse_twelve(std::string_view text, const std::string& where) {
  std::istringstream in{std::string(text)};
  std::array<double, 12> values{};
  std::string tok;
  std::size_t n = 0;
  while (in >> tok) {
    if (n == 12) throw Error(ErrorCode::ParseError, where + ": more than 12 values");
    values[n++] = parse_double(tok, where);
    if (!std::isfinite(values[n - 1])) {
      throw Error(ErrorCode::ParseError, where + ": non-finite value");
    }
  }
  if (n != 12) {
    throw Error(ErrorCode::ParseError,
                where + ": expected 12 values, got " + std::to_string(n));
  }
  return values;
}

}  // namespace

Pose read_calibration(const fs::path& path) {
  std::istringstream in(read_bytes(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.rfind("Tr:", 0) != 0) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    const auto v = parse_twelve(std::string_view(t).substr(3), where);
    try {
      return Pose::from_row_major(v);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, where + ": " + e.what());
    }
  }
  throw Error(ErrorCode::ParseError, path.string() + ": no 'Tr:' line");
}

std::vector<Pose> read_poses(const fs::path& path, const std::optional<fs::path>& calib) {
  std::optional<Pose> tr;
  if (calib) tr = read_calibration(*calib);

  std::istringstream in(read_bytes(path));
  std::vector<Pose> poses;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    const auto v = parse_twelve(line, where);
    Pose p;
    try {
      p = Pose::from_row_major(v);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, where + ": " + e.what());
    }
    poses.push_back(tr ? tr->inverse() * p * *tr : p);
  }
  return poses;
}

// ---------------------------------------------------------------- dataset spec

void DatasetSpec::validate() const {
  for (const auto& name : terrain_labels) {
    if (!label_ids.count(name)) {
      throw Error(ErrorCode::InvalidConfig, "terrain label '" + name + "' has no id");
    }
  }
  for (const auto& name : ambiguous_labels) {
    if (!label_ids.count(name)) {
      throw Error(ErrorCode::InvalidConfig, "ambiguous label '" + name + "' has no id");
    }
  }
  if (!(sensor_height > 0.0)) throw Error(ErrorCode::InvalidConfig, "sensor_height must be > 0");
}

std::map<std::uint32_t, GtClass> DatasetSpec::class_table() const {
  std::map<std::uint32_t, GtClass> table;
  for (const auto& [name, id] : label_ids) {
    GtClass c = GtClass::NonTerrain;
    if (ambiguous_labels.count(name)) c = GtClass::Ambiguous;
    else if (terrain_labels.count(name)) c = GtClass::Terrain;
    table[id] = c;
  }
  return table;
}

std::optional<GtClass> DatasetSpec::classify(std::uint32_t id) const {
  const auto table = class_table();
  const auto it = table.find(id);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

DatasetSpec DatasetSpec::from_keyvalue(const KeyValueFile& kv) {
  DatasetSpec spec;
  spec.name = kv.get("name").value_or("unnamed");
  if (auto h = kv.get_double("sensor_height")) spec.sensor_height = *h;
  for (const auto& v : kv.get_all("terrain_labels")) {
    for (auto& name : split(v, ',')) spec.terrain_labels.insert(name);
  }
  for (const auto& v : kv.get_all("ambiguous_labels")) {
    for (auto& name : split(v, ',')) spec.ambiguous_labels.insert(name);
  }
  for (const auto& [key, value] : kv.entries()) {
    if (key.rfind("label.", 0) == 0) {
      const long long id = parse_int(value, kv.origin() + " " + key);
      if (id < 0 || id > 0xFFFF) {
        throw Error(ErrorCode::InvalidConfig, key + " must lie in [0, 65535]");
      }
      spec.label_ids[key.substr(6)] = static_cast<std::uint32_t>(id);
    } else if (key != "name" && key != "sensor_height" && key != "terrain_labels" &&
               key != "ambiguous_labels") {
      throw Error(ErrorCode::InvalidConfig, kv.origin() + ": unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

DatasetSpec DatasetSpec::load(const fs::path& path) {
  return from_keyvalue(KeyValueFile::load(path));
}

// ---------------------------------------------------------------- scans, labels

PointCloud read_scan_bin(const fs::path& path, std::size_t* dropped) {
  const std::string bytes = read_bytes(path);
  if (bytes.size() % 16 != 0) {
    throw Error(ErrorCode::MalformedFile, path.string() + ": size " +
                                              std::to_string(bytes.size()) +
                                              " is not a multiple of 16 bytes");
  }
  PointCloud cloud;
  const std::size_t n = bytes.size() / 16;
  cloud.points.reserve(n);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const char* rec = bytes.data() + 16 * i;
    const Point3 p(load_le<float>(rec), load_le<float>(rec + 4), load_le<float>(rec + 8));
    if (!is_finite(p)) {
      ++bad;
      continue;
    }
    cloud.points.push_back(p);
  }
  if (dropped) *dropped = bad;
  return cloud;
}

void write_scan_bin(const PointCloud& cloud, const fs::path& path) {
  std::string buf;
  buf.reserve(cloud.size() * 16);
  for (const auto& p : cloud.points) {
    store_le(buf, static_cast<float>(p.x()));
    store_le(buf, static_cast<float>(p.y()));
    store_le(buf, static_cast<float>(p.z()));
    store_le(buf, 0.0f);
  }
  auto out = open_out(path, true);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish(out, path);
}

std::vector<std::uint32_t> read_raw_labels(const fs::path& path) {
  const std::string bytes = read_bytes(path);
  if (bytes.size() % 4 != 0) {
    throw Error(ErrorCode::MalformedFile,
                path.string() + ": size is not a multiple of 4 bytes");
  }
  std::vector<std::uint32_t> ids(bytes.size() / 4);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ids[i] = load_le<std::uint32_t>(bytes.data() + 4 * i) & 0xFFFFu;
  }
  return ids;
}

void write_raw_labels(std::span<const std::uint32_t> ids, const fs::path& path) {
  std::string buf;
  buf.reserve(ids.size() * 4);
  for (auto id : ids) store_le(buf, id);
  auto out = open_out(path, true);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish(out, path);
}

GroundTruth classify_labels(std::span<const std::uint32_t> ids, const DatasetSpec& spec) {
  const auto table = spec.class_table();
  GroundTruth gt;
  gt.classes.reserve(ids.size());
  for (auto id : ids) {
    const auto it = table.find(id & 0xFFFFu);
    if (it == table.end()) {
      ++gt.unknown_ids;
      gt.classes.push_back(GtClass::NonTerrain);
    } else {
      gt.classes.push_back(it->second);
    }
  }
  return gt;
}

GroundTruth read_labels(const fs::path& path, const DatasetSpec& spec,
                        std::optional<std::size_t> expected_count) {
  const auto ids = read_raw_labels(path);
  if (expected_count && ids.size() != *expected_count) {
    throw Error(ErrorCode::CountMismatch, path.string() + ": " + std::to_string(ids.size()) +
                                              " labels for " + std::to_string(*expected_count) +
                                              " points");
  }
  return classify_labels(ids, spec);
}

// ---------------------------------------------------------------- voxels, maps

PointCloud voxel_downsample(const PointCloud& cloud, double resolution, const DatasetSpec* spec) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::InvalidConfig, "voxel resolution must be > 0");
  const bool labeled = cloud.has_labels();
  if (labeled && cloud.labels.size() != cloud.points.size()) {
    throw Error(ErrorCode::CountMismatch, "cloud labels do not match point count");
  }

  using Key = std::array<std::int64_t, 3>;
  std::vector<Key> keys(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    keys[i] = {static_cast<std::int64_t>(std::floor(p.x() / resolution)),
               static_cast<std::int64_t>(std::floor(p.y() / resolution)),
               static_cast<std::int64_t>(std::floor(p.z() / resolution))};
  }
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });

  std::map<std::uint32_t, GtClass> table;
  if (spec) table = spec->class_table();
  auto class_of = [&](std::uint32_t id) {
    const auto it = table.find(id);
    return it == table.end() ? GtClass::NonTerrain : it->second;
  };

  PointCloud out;
  out.frame_id = cloud.frame_id;
  std::map<std::uint32_t, std::size_t> id_count;
  for (std::size_t s = 0; s < order.size();) {
    std::size_t e = s;
    Point3 sum = Point3::Zero();
    while (e < order.size() && keys[order[e]] == keys[order[s]]) {
      sum += cloud.points[order[e]];
      ++e;
    }
    out.points.push_back(sum / static_cast<double>(e - s));

    if (labeled) {
      id_count.clear();
      for (std::size_t k = s; k < e; ++k) ++id_count[cloud.labels[order[k]]];
      std::optional<GtClass> winner;
      if (spec) {
        std::array<std::size_t, 3> votes{};
        for (const auto& [id, n] : id_count) votes[static_cast<int>(class_of(id))] += n;
        const auto t = votes[static_cast<int>(GtClass::Terrain)];
        const auto a = votes[static_cast<int>(GtClass::Ambiguous)];
        const auto o = votes[static_cast<int>(GtClass::NonTerrain)];
        winner = (t >= a && t >= o) ? GtClass::Terrain : (a >= o ? GtClass::Ambiguous : GtClass::NonTerrain);
      }
      std::uint32_t best_id = 0;
      std::size_t best_n = 0;
      for (const auto& [id, n] : id_count) {  // ascending id, so ties keep the lowest
        if (winner && class_of(id) != *winner) continue;
        if (n > best_n) {
          best_n = n;
          best_id = id;
        }
      }
      out.labels.push_back(best_id);
    }
    s = e;
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> partial_map_windows(std::size_t frames,
                                                                     std::size_t frames_per_map) {
  if (frames_per_map == 0) throw Error(ErrorCode::InvalidConfig, "frames_per_map must be > 0");
  std::vector<std::pair<std::size_t, std::size_t>> windows;
  for (std::size_t b = 0; b < frames; b += frames_per_map) {
    windows.emplace_back(b, std::min(frames, b + frames_per_map));
  }
  return windows;
}

PointCloud build_partial_map(std::span<const PointCloud> scans, std::span<const Pose> poses,
                             double resolution, const DatasetSpec* spec) {
  if (scans.size() != poses.size()) {
    throw Error(ErrorCode::SequenceLengthMismatch,
                std::to_string(scans.size()) + " scans but " + std::to_string(poses.size()) +
                    " poses");
  }
  PointCloud merged;
  const bool labeled = !scans.empty() && std::all_of(scans.begin(), scans.end(), [](const PointCloud& c) {
    return c.has_labels() || c.empty();
  });
  for (std::size_t f = 0; f < scans.size(); ++f) {
    const PointCloud& scan = scans[f];
    if (scan.has_labels() && scan.labels.size() != scan.size()) {
      throw Error(ErrorCode::CountMismatch, "scan " + std::to_string(f) + " label count mismatch");
    }
    for (std::size_t i = 0; i < scan.size(); ++i) {
      merged.points.push_back(poses[f].apply(scan.points[i]));
      if (labeled) merged.labels.push_back(scan.labels[i]);
    }
  }
  return voxel_downsample(merged, resolution, spec);
}

std::vector<PointCloud> accumulate_partial_map(std::span<const PointCloud> scans,
                                               std::span<const Pose> poses,
                                               std::size_t frames_per_map, double resolution,
                                               const DatasetSpec* spec) {
  if (scans.size() != poses.size()) {
    throw Error(ErrorCode::SequenceLengthMismatch,
                std::to_string(scans.size()) + " scans but " + std::to_string(poses.size()) +
                    " poses");
  }
  std::vector<PointCloud> maps;
  for (const auto& [b, e] : partial_map_windows(scans.size(), frames_per_map)) {
    maps.push_back(build_partial_map(scans.subspan(b, e - b), poses.subspan(b, e - b),
                                     resolution, spec));
    maps.back().frame_id = static_cast<std::int64_t>(b);
  }
  return maps;
}

// ---------------------------------------------------------------- results

ResultFormat format_for_path(const fs::path& path) {
  return path.extension() == ".txt" ? ResultFormat::LabeledText : ResultFormat::LabeledBinary;
}

void write_labels(std::span<const PointLabel> labels, const PointCloud& cloud,
                  const fs::path& path, ResultFormat format) {
  std::string buf;
  if (format == ResultFormat::LabeledBinary) {
    buf.reserve(labels.size());
    for (auto l : labels) buf.push_back(static_cast<char>(l));
  } else {
    if (cloud.size() != labels.size()) {
      throw Error(ErrorCode::CountMismatch, "labeled-text needs one point per label");
    }
    buf.reserve(labels.size() * 40);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto& p = cloud.points[i];
      append_double(buf, p.x());
      buf.push_back(' ');
      append_double(buf, p.y());
      buf.push_back(' ');
      append_double(buf, p.z());
      buf.push_back(' ');
      buf.push_back(labels[i] == PointLabel::Terrain ? '1' : '0');
      buf.push_back('\n');
    }
  }
  auto out = open_out(path, format == ResultFormat::LabeledBinary);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  finish(out, path);
}

void write_result(const SegmentationResult& result, const PointCloud& cloud,
                  const fs::path& path, ResultFormat format) {
  write_labels(result.labels, cloud, path, format);
}

std::vector<PointLabel> read_labels_binary(const fs::path& path) {
  const std::string bytes = read_bytes(path);
  std::vector<PointLabel> labels;
  labels.reserve(bytes.size());
  for (char c : bytes) {
    const auto v = static_cast<unsigned char>(c);
    if (v > 1) throw Error(ErrorCode::MalformedFile, path.string() + ": label byte is not 0/1");
    labels.push_back(static_cast<PointLabel>(v));
  }
  return labels;
}

std::pair<PointCloud, std::vector<PointLabel>> read_labeled_text(const fs::path& path) {
  std::istringstream in(read_bytes(path));
  std::pair<PointCloud, std::vector<PointLabel>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = split(line, ' ');
    if (fields.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (fields.size() != 4) throw Error(ErrorCode::ParseError, where + ": expected 'x y z label'");
    out.first.points.emplace_back(parse_double(fields[0], where), parse_double(fields[1], where),
                                  parse_double(fields[2], where));
    const long long l = parse_int(fields[3], where);
    if (l != 0 && l != 1) throw Error(ErrorCode::ParseError, where + ": label must be 0 or 1");
    out.second.push_back(static_cast<PointLabel>(l));
  }
  return out;
}

PointCloud read_cloud(const fs::path& path, std::size_t* dropped) {
  if (path.extension() != ".txt") return read_scan_bin(path, dropped);
  std::istringstream in(read_bytes(path));
  PointCloud cloud;
  std::size_t bad = 0;
  std::string line;
  int lineno = 0;
  bool with_labels = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split(line, ' ');
    if (fields.empty() || fields[0].front() == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (fields.size() != 3 && fields.size() != 4) {
      throw Error(ErrorCode::ParseError, where + ": expected 'x y z [label]'");
    }
    if (cloud.points.empty() && bad == 0) with_labels = fields.size() == 4;
    if ((fields.size() == 4) != with_labels) {
      throw Error(ErrorCode::ParseError, where + ": inconsistent column count");
    }
    auto num = [&](const std::string& s) {
      // "nan"/"inf" are accepted here so they can be counted as dropped.
      if (s == "nan" || s == "-nan" || s == "inf" || s == "-inf") return std::nan("");
      return parse_double(s, where);
    };
    const Point3 p(num(fields[0]), num(fields[1]), num(fields[2]));
    if (!is_finite(p)) {
      ++bad;
      continue;
    }
    cloud.points.push_back(p);
    if (with_labels) cloud.labels.push_back(static_cast<std::uint32_t>(parse_int(fields[3], where)));
  }
  if (dropped) *dropped = bad;
  return cloud;
}

}  // namespace btms::io
