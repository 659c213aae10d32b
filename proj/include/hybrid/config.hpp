#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hybrid {

/// Parsed scenario description: flat `key = value` pairs.
///
/// Text format (version tag on the first non-blank line is optional):
///
///     # hybrid-scenario v1
///     dimension = 2
///     agents = 2
///     coefficients = anisotropic-constant
///     x0 = 0.5 0 -0.5 0      # agent-major: x_{1,1} x_{1,2} x_{2,1} x_{2,2}
///
/// Lists are whitespace- or comma-separated. `#` starts a comment.
class ScenarioConfig {
public:
  ScenarioConfig() = default;

  static ScenarioConfig parse(const std::string& text);
  static ScenarioConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_optional(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Canonical text: keys sorted, numbers normalized to 17 significant digits.
  std::string canonical_text() const;
  /// FNV-1a 64-bit digest of canonical_text(), as 16 hex digits.
  std::string digest() const;

private:
  std::map<std::string, std::string> entries_;
};

std::string format_double(double value);

}  // namespace hybrid
