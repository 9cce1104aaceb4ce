#include "marl/rollout/epsilon.h"

#include <algorithm>

namespace marl::rollout {

std::vector<std::string> EpsilonSchedule::validate(const std::string& prefix) const {
  std::vector<std::string> issues;
  if (!(start >= 0.0 && start <= 1.0)) issues.push_back(prefix + ".start must lie in [0, 1]");
  if (!(finish >= 0.0 && finish <= 1.0)) issues.push_back(prefix + ".finish must lie in [0, 1]");
  if (finish > start) issues.push_back(prefix + ".finish must not exceed " + prefix + ".start");
  return issues;
}

double epsilon_at(const EpsilonSchedule& schedule, std::uint64_t env_steps) {
  if (env_steps >= schedule.anneal_steps) return schedule.finish;
  const double frac =
      static_cast<double>(env_steps) / static_cast<double>(schedule.anneal_steps);
  return std::max(schedule.finish, schedule.start + frac * (schedule.finish - schedule.start));
}

}  // namespace marl::rollout
