#pragma once

#include <string>
#include <vector>

#include "marl/cli/experiment_config.h"

namespace marl::cli {

struct Preset {
  std::string name;
  std::string description;
  ExperimentConfig config;
};

// Every shipped preset, in a stable order.
const std::vector<Preset>& presets();
std::vector<std::string> preset_names();
// Throws ConfigError for an unknown name.
const Preset& find_preset(const std::string& name);

// A trick study: arms that differ from one another in exactly `key`.
struct Study {
  std::string name;
  std::string key;  // dotted config key
  std::vector<std::string> arms;
};
const std::vector<Study>& studies();

// A preset name yields that preset; a study name yields its arms in order.
std::vector<const Preset*> resolve(const std::string& name);

// Dotted keys whose values differ between two configs (output_dir ignored).
std::vector<std::string> diff_keys(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace marl::cli
