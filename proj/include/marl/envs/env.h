#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "marl/common/rng.h"

namespace marl::envs {

struct StepResult {
  double reward = 0.0;      // shared by all agents
  bool terminated = false;  // task ended (no bootstrap)
  bool truncated = false;   // time limit reached (bootstrap)
  bool won = false;         // task-specific success flag

  bool done() const noexcept { return terminated || truncated; }
};

// Cooperative multi-agent environment with a shared reward.
class Env {
 public:
  virtual ~Env() = default;

  // Starts a new episode. All randomness of the episode is drawn from `rng`
  // at this point, so equal rng states give equal episodes.
  virtual void reset(Rng& rng) = 0;
  virtual StepResult step(std::span<const int> actions) = 0;

  virtual std::vector<double> observe(std::size_t agent) const = 0;
  virtual std::vector<double> global_state() const = 0;

  virtual std::size_t n_agents() const = 0;
  virtual std::size_t n_actions() const = 0;
  virtual std::size_t obs_dim() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t episode_limit() const = 0;
  virtual std::string name() const = 0;

  virtual std::unique_ptr<Env> clone() const = 0;
};

}  // namespace marl::envs
