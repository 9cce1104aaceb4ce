#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marl/nets/optimizer.h"
#include "marl/rollout/epsilon.h"

namespace marl::trainers {

enum class Algo { kVdn, kQmix, kQatten, kQplex, kOwQmix, kRiit, kLica, kVmix };

std::string to_string(Algo algo);
Algo algo_from_string(const std::string& name);  // throws ConfigError
bool is_value_based(Algo algo);

std::string to_string(nets::OptimizerKind kind);
nets::OptimizerKind optimizer_from_string(const std::string& name);

struct TrainerConfig {
  Algo algo = Algo::kQmix;
  double gamma = 0.99;
  double lambda = 0.6;
  std::size_t batch_size = 128;        // offline batch (episodes)
  std::size_t online_batch_size = 32;  // RIIT / LICA online memory
  std::size_t buffer_capacity = 5000;
  std::uint64_t target_update_interval = 200;  // episodes
  nets::OptimizerKind optimizer = nets::OptimizerKind::kAdam;
  double lr = 0.001;         // agent / policy networks
  double critic_lr = 0.001;  // mixers and critics
  double clip_norm = 10.0;
  double entropy_coef = 0.0;
  double alpha = 0.5;  // OW-QMIX weight for overestimated samples
  std::size_t workers = 8;
  std::uint64_t total_env_steps = 2'000'000;
  std::size_t hidden = 64;
  std::size_t mixer_embed = 32;
  std::size_t attention_heads = 4;
  bool constrain_monotonic = true;
  std::size_t offline_updates = 1;  // RIIT off-policy critic steps per online step
  rollout::EpsilonSchedule epsilon;
  bool log_wall_clock = false;

  // Documented defaults for `algo`.
  static TrainerConfig defaults(Algo algo);

  // Every range violation, keys prefixed with `prefix`.
  std::vector<std::string> validate(const std::string& prefix = "trainer") const;

  friend bool operator==(const TrainerConfig&, const TrainerConfig&) = default;
};

}  // namespace marl::trainers
