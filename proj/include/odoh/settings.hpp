#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace odoh {

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
EnvLookup process_env();

/// Flat key=value settings, '#' comments. Keys are case-insensitive and
/// normalized to lowercase with '-' folded to '_'.
class Settings {
 public:
  static Settings parse(std::string_view text);
  static Settings load(const std::string& path);

  /// For every known key, PREFIX + KEY (uppercased) in the environment
  /// overrides the file value.
  void apply_env(std::string_view prefix, const std::vector<std::string>& keys, const EnvLookup& env);

  void set(const std::string& key, std::string value);
  [[nodiscard]] std::optional<std::string> get(const std::string& key) const;
  [[nodiscard]] std::string get_or(const std::string& key, std::string fallback) const;
  /// Throws Error{ConfigInvalid} on a non-numeric value.
  [[nodiscard]] long long get_int(const std::string& key, long long fallback) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated list; empty items dropped.
  [[nodiscard]] std::vector<std::string> get_list(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace odoh
