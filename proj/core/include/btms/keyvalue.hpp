#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace btms {

// Ordered `key = value` document. Blank lines and lines starting with '#'
// are ignored; keys may repeat.
class KeyValueFile {
 public:
  using Entry = std::pair<std::string, std::string>;

  static KeyValueFile parse(std::string_view text, const std::string& origin = "<string>");
  static KeyValueFile load(const std::filesystem::path& path);

  const std::vector<Entry>& entries() const noexcept { return entries_; }

  // Last value for `key`, if any.
  std::optional<std::string> get(std::string_view key) const;
  std::vector<std::string> get_all(std::string_view key) const;

  std::optional<double> get_double(std::string_view key) const;
  std::optional<long long> get_int(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;

  const std::string& origin() const noexcept { return origin_; }

 private:
  std::vector<Entry> entries_;
  std::vector<int> lines_;
  std::string origin_;

  int line_of(std::string_view key) const;
};

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);

// Strict numeric parsing; throws ParseError mentioning `what`.
double parse_double(std::string_view s, std::string_view what);
long long parse_int(std::string_view s, std::string_view what);
bool parse_bool(std::string_view s, std::string_view what);

}  // namespace btms
