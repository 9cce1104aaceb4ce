#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "marl/envs/env_config.h"
#include "marl/trainers/config.h"
#include "marl/trainers/trainer.h"

namespace marl::cli {

using Json = nlohmann::json;

struct ExperimentConfig {
  std::uint64_t seed = 1;  // seeds seed, seed + 1, ... seed + n_seeds - 1
  std::size_t n_seeds = 5;
  std::uint64_t eval_interval = 10000;
  std::size_t test_episodes = 32;
  std::string output_dir = "runs";
  envs::EnvConfig env;
  trainers::TrainerConfig trainer = trainers::TrainerConfig::defaults(trainers::Algo::kQmix);

  std::vector<std::string> validate() const;
  // Settings for the k-th seed (0-based).
  trainers::RunConfig run_config(std::size_t k) const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

Json to_json(const ExperimentConfig& cfg);

// Fills every key absent from `overlay` with the documented default for the
// algorithm and environment the overlay names. Throws ConfigError listing
// every unknown key, type mismatch and range violation.
ExperimentConfig from_json(const Json& overlay);

// "{...}" text -> overlay. Parse errors name line and column.
Json parse_json_text(std::string_view text, std::string_view source = "config");
Json read_json_file(const std::string& path);

// Applies one "a.b.c=value" assignment. The value is read as JSON when it
// parses as JSON, otherwise as a string.
void apply_flag(Json& overlay, std::string_view assignment);

// Recursive merge; `top` wins on leaves.
void merge_into(Json& base, const Json& top);

// preset (may be null) <- file (may be empty) <- flags, then from_json.
ExperimentConfig parse_config(const Json& preset, const std::string& path,
                              std::span<const std::string> flags);

// FNV-1a over the canonical JSON without output_dir, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace marl::cli
