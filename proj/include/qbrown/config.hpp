#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qbrown/params.hpp"

namespace qbrown {

inline constexpr std::string_view kScenarioNames[] = {
    "free-zero-T",        "free-high-friction", "vacuum-spreading", "harmonic",           "classical-telegraph",
    "quantum-zero-T-pde", "semiclassical-pde",  "equilibrium",      "dispersion-compare", "acceptance",
};

struct ConfigIssue {
  int line;  ///< 0 when the issue is not tied to a line
  std::string message;
};

/// Every problem found in a config file.
class ConfigParseError : public ConfigError {
public:
  explicit ConfigParseError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
  std::vector<ConfigIssue> issues_;
};

struct ConfigValue {
  std::string text;
  int line;  ///< 0 for defaults
};

/// A validated scenario: every key the scenario understands, with defaults
/// filled in.
class ScenarioConfig {
public:
  std::string scenario;
  PhysicalParams params = PhysicalParams::natural_units();
  std::map<std::string, ConfigValue> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  bool is_default(const std::string& key) const;
  bool is_auto(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;
};

/// Parses flat `key = value` text with `#` comments. Throws ConfigParseError
/// listing every unknown, duplicate, missing or out-of-range entry.
ScenarioConfig parse_config(std::string_view text);

/// Reads and parses a file; an unreadable file is a ConfigError.
ScenarioConfig load_config(const std::string& path);

}  // namespace qbrown
