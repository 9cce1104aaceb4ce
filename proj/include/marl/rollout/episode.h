#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "marl/autodiff/tensor.h"

namespace marl::rollout {

// One recorded episode of length T. States and observations hold T + 1
// entries: the last one is the state reached after the final step.
struct Episode {
  std::size_t n_agents = 0;
  std::size_t n_actions = 0;
  std::size_t obs_dim = 0;
  std::size_t state_dim = 0;

  std::vector<std::vector<double>> states;  // [T+1][state_dim]
  std::vector<std::vector<double>> obs;     // [T+1][n_agents * obs_dim]
  std::vector<std::vector<int>> actions;    // [T][n_agents]
  std::vector<double> rewards;              // [T]
  bool terminated = false;  // last step ended the task
  bool truncated = false;   // last step hit the time limit
  bool won = false;
  std::uint64_t policy_version = 0;  // trainer update count when collected

  std::size_t length() const noexcept { return rewards.size(); }
  double total_return() const;
};

// Episodes padded to a common length T. Row layouts are time-major:
//   states  [(T+1)*B, state_dim], row t*B + b
//   obs     [(T+1)*B*n, obs_dim], row (t*B + b)*n + i
//   actions [T*B*n],              entry (t*B + b)*n + i
// and reward / terminated / mask are [B,T]. Padded entries are 0.
struct EpisodeBatch {
  std::size_t batch = 0;
  std::size_t steps = 0;
  std::size_t n_agents = 0;
  std::size_t n_actions = 0;

  ad::Tensor states;
  ad::Tensor obs;
  std::vector<int> actions;
  ad::Tensor reward;
  ad::Tensor terminated;
  ad::Tensor mask;
  std::vector<std::size_t> lengths;
  std::vector<std::uint64_t> policy_versions;

  std::size_t agent_rows() const noexcept { return batch * n_agents; }
};

EpisodeBatch make_batch(std::span<const Episode* const> episodes);

}  // namespace marl::rollout
