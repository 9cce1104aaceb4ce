#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "marl/envs/env.h"

namespace marl::envs {

// One line-delimited JSON record:
// {"t":..,"state":[..],"actions":[..],"reward":..,"terminated":..,"truncated":..}
void write_trace_record(std::ostream& out, int t, std::span<const double> state,
                        std::span<const int> actions, const StepResult& result);

using ActionFn = std::function<std::vector<int>(const Env& env, Rng& rng)>;

// Resets `env`, plays one episode choosing actions with `policy`, and writes a
// record per step (state is the one the actions were taken in). Returns the
// step results.
std::vector<StepResult> trace_episode(Env& env, Rng& rng, const ActionFn& policy,
                                      std::ostream* out);

}  // namespace marl::envs
