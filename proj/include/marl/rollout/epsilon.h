#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace marl::rollout {

// Linear annealing from `start` to `finish` over `anneal_steps` env steps.
struct EpsilonSchedule {
  double start = 1.0;
  double finish = 0.05;
  std::uint64_t anneal_steps = 50000;

  std::vector<std::string> validate(const std::string& prefix = "epsilon") const;

  friend bool operator==(const EpsilonSchedule&, const EpsilonSchedule&) = default;
};

double epsilon_at(const EpsilonSchedule& schedule, std::uint64_t env_steps);

}  // namespace marl::rollout
