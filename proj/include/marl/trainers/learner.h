#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "marl/envs/env.h"
#include "marl/nets/optimizer.h"
#include "marl/rollout/policy.h"
#include "marl/rollout/replay_buffer.h"
#include "marl/trainers/config.h"

namespace marl::trainers {

using ad::Tensor;

// Offline memory D and online memory D' (the most recent episodes).
struct Buffers {
  rollout::ReplayBuffer offline;
  rollout::ReplayBuffer online;
};

// Several parameter sets optimized together: gradients are clipped by their
// joint global norm, then each set takes its own optimizer step.
class ParamGroup {
 public:
  explicit ParamGroup(double clip_norm) : clip_norm_(clip_norm) {}
  ParamGroup(const ParamGroup&) = delete;
  ParamGroup& operator=(const ParamGroup&) = delete;

  void add(nets::ParamSet& params, nets::OptimizerConfig config);
  // grads[k] belongs to the k-th added set. Returns the unclipped norm.
  double step(std::vector<std::vector<Tensor>> grads);

 private:
  double clip_norm_;
  std::vector<nets::ParamSet*> sets_;
  std::vector<nets::Optimizer> optimizers_;
};

nets::OptimizerConfig optimizer_config(const TrainerConfig& cfg, double lr);
nets::AgentNetSpec agent_spec(const envs::Env& env, const TrainerConfig& cfg,
                              std::size_t out_dim = 0);

class Learner {
 public:
  virtual ~Learner() = default;
  Learner() = default;
  Learner(const Learner&) = delete;
  Learner& operator=(const Learner&) = delete;

  // Acting rule while collecting training episodes.
  virtual rollout::PolicyFactory behaviour(double epsilon) const = 0;
  // Greedy acting rule for evaluation.
  virtual rollout::PolicyFactory greedy() const = 0;
  // Whether the buffers hold enough episodes for an update.
  virtual bool ready(const Buffers& buffers) const = 0;
  // One update; returns the reported loss.
  virtual double update(const Buffers& buffers, Rng& rng) = 0;
  virtual void update_targets() = 0;
  // Episodes kept in the online memory.
  virtual std::size_t online_capacity() const = 0;
  // Whether collection uses epsilon (reported in the metric log).
  virtual bool uses_epsilon() const = 0;

  std::uint64_t updates() const noexcept { return updates_; }

 protected:
  std::uint64_t updates_ = 0;
};

std::unique_ptr<Learner> make_learner(const TrainerConfig& cfg, const envs::Env& env, Rng& rng);

}  // namespace marl::trainers
