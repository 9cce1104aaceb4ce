#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "marl/envs/env.h"
#include "marl/rollout/episode.h"
#include "marl/rollout/policy.h"

namespace marl::rollout {

// Plays one episode from env.reset(rng) until it terminates or truncates.
Episode run_episode(envs::Env& env, Policy& policy, Rng& rng);

// W independent environment copies, each with its own random stream seeded
// worker_seed(seed, w). Evaluation episodes draw from separate streams so
// testing never perturbs training.
class RolloutWorkers {
 public:
  RolloutWorkers(const envs::Env& prototype, std::size_t workers, std::uint64_t seed);

  std::size_t size() const noexcept { return envs_.size(); }

  // One episode per worker, returned in worker order. Workers run on
  // separate threads when there are several; each builds its own policy.
  std::vector<Episode> collect(const PolicyFactory& make_policy);

  // `count` episodes spread round-robin over the workers' evaluation streams.
  std::vector<Episode> evaluate(const PolicyFactory& make_policy, std::size_t count);

 private:
  std::vector<Episode> run(const PolicyFactory& make_policy, std::vector<Rng>& streams,
                           std::size_t count);

  std::vector<std::unique_ptr<envs::Env>> envs_;
  std::vector<Rng> train_rng_;
  std::vector<Rng> eval_rng_;
};

}  // namespace marl::rollout
