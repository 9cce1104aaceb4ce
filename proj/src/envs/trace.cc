#include "marl/envs/trace.h"

#include <json.hpp>

namespace marl::envs {

void write_trace_record(std::ostream& out, int t, std::span<const double> state,
                        std::span<const int> actions, const StepResult& result) {
  nlohmann::json record;
  record["t"] = t;
  record["state"] = std::vector<double>(state.begin(), state.end());
  record["actions"] = std::vector<int>(actions.begin(), actions.end());
  record["reward"] = result.reward;
  record["terminated"] = result.terminated;
  record["truncated"] = result.truncated;
  out << record.dump() << '\n';
}

std::vector<StepResult> trace_episode(Env& env, Rng& rng, const ActionFn& policy,
                                      std::ostream* out) {
  env.reset(rng);
  std::vector<StepResult> results;
  for (int t = 0;; ++t) {
    const std::vector<double> state = env.global_state();
    const std::vector<int> actions = policy(env, rng);
    const StepResult r = env.step(actions);
    if (out) write_trace_record(*out, t, state, actions, r);
    results.push_back(r);
    if (r.done()) break;
  }
  return results;
}

}  // namespace marl::envs
