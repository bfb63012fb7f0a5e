#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mctslab {

/// Invalid configuration text or field. what() names the source, line and key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration with dotted keys. '#' starts a comment;
/// blank lines are ignored; duplicate keys are an error.
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  Config() = default;
  static Config parse(std::string_view text, std::string source = "<string>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  void set(const std::string& key, std::string value);
  void erase(const std::string& key) { entries_.erase(key); }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma separated list; items are trimmed.
  std::vector<std::string> get_list(const std::string& key) const;

  /// Keys starting with `prefix`.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
  std::vector<std::string> keys() const;

  /// Sorted `key=value` lines; the basis of hash().
  std::string canonical() const;
  /// FNV-1a 64 of canonical().
  std::uint64_t hash() const;
  std::string hash_hex() const;

  /// Throws ConfigError naming the first key not in `known` and not matching
  /// one of `known_prefixes`.
  void require_known(const std::set<std::string>& known, const std::vector<std::string>& known_prefixes) const;

  const std::string& source() const { return source_; }

  /// ConfigError for `key` with the location prefix filled in.
  ConfigError error(const std::string& key, const std::string& message) const;

 private:
  const Entry& entry(const std::string& key) const;

  std::map<std::string, Entry> entries_;
  std::string source_ = "<string>";
};

/// Parses a double, accepting "inf"/"max" for +infinity. std::nullopt on failure.
std::optional<double> parse_double(std::string_view s);

/// Shortest round-trip text for a double ("%.17g", with inf/nan spelled out).
std::string format_double(double x);

}  // namespace mctslab
