#include "btms/keyvalue.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "btms/error.hpp"

namespace btms {

std::string trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(delim, start);
    const auto end = pos == std::string_view::npos ? s.size() : pos;
    auto piece = trim(s.substr(start, end - start));
    if (!piece.empty()) out.push_back(std::move(piece));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::string_view what) {
  const auto t = trim(s);
  // std::from_chars for double is available in libstdc++ 11.
  double value = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (t.empty() || ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::ParseError,
                "cannot parse '" + t + "' as a number for " + std::string(what));
  }
  return value;
}

long long parse_int(std::string_view s, std::string_view what) {
  const auto t = trim(s);
  long long value = 0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (t.empty() || ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::ParseError,
                "cannot parse '" + t + "' as an integer for " + std::string(what));
  }
  return value;
}

bool parse_bool(std::string_view s, std::string_view what) {
  auto t = trim(s);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw Error(ErrorCode::ParseError,
              "cannot parse '" + t + "' as a boolean for " + std::string(what));
}

KeyValueFile KeyValueFile::parse(std::string_view text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError,
                  origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    auto key = trim(std::string_view(t).substr(0, eq));
    auto value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::ParseError,
                  origin + ":" + std::to_string(lineno) + ": empty key");
    }
    kv.entries_.emplace_back(std::move(key), std::move(value));
    kv.lines_.push_back(lineno);
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

int KeyValueFile::line_of(std::string_view key) const {
  for (std::size_t i = entries_.size(); i-- > 0;) {
    if (entries_[i].first == key) return lines_[i];
  }
  return 0;
}

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->first == key) return it->second;
  }
  return std::nullopt;
}

std::vector<std::string> KeyValueFile::get_all(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k == key) out.push_back(v);
  }
  return out;
}

std::optional<double> KeyValueFile::get_double(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return parse_double(*v, origin_ + ":" + std::to_string(line_of(key)) + " " + std::string(key));
}

std::optional<long long> KeyValueFile::get_int(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return parse_int(*v, origin_ + ":" + std::to_string(line_of(key)) + " " + std::string(key));
}

std::optional<bool> KeyValueFile::get_bool(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return parse_bool(*v, origin_ + ":" + std::to_string(line_of(key)) + " " + std::string(key));
}

}  // namespace btms
