#pragma once

// Plain-text `key = value` configuration files. Lines starting with '#' and
// blank lines are ignored; trailing `# comment`s are stripped. Toggle-switch
// parameters use their field names (kappa_L_m0, theta_TetR, ...).

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ratiometric/agent_sim.hpp"
#include "ratiometric/model.hpp"

namespace ratiometric {

class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& is, const std::string& origin = "<stream>");
  static KeyValueConfig load(const std::filesystem::path& path);

  [[nodiscard]] bool contains(const std::string& key) const { return values_.contains(key); }
  [[nodiscard]] const std::string& at(const std::string& key) const;
  [[nodiscard]] double number(const std::string& key) const;
  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

/// Starts from `base` and overrides every parameter key present. Throws
/// ConfigError on unknown keys or invalid values.
[[nodiscard]] ToggleSwitchParams load_params(const KeyValueConfig& kv,
                                             ToggleSwitchParams base = {});

/// Starts from ExperimentConfig::defaults(mode) (mode from the `mode` key, or
/// `base_mode`) and applies every key. Accepts all parameter keys too.
[[nodiscard]] ExperimentConfig load_experiment_config(
    const KeyValueConfig& kv, PopulationMode base_mode = PopulationMode::kFixed);

/// Every recognised key with its current value, in a stable order.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> config_entries(
    const ExperimentConfig& cfg);

/// Names of the 20 toggle-switch parameters.
[[nodiscard]] const std::vector<std::string>& param_keys();

void write_config(std::ostream& os, const ExperimentConfig& cfg);

}  // namespace ratiometric
