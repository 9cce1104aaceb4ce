#pragma once

#include "marl/mixers/monotonic_mixer.h"
#include "marl/nets/agent_net.h"
#include "marl/rollout/episode.h"
#include "marl/trainers/learner.h"

namespace marl::trainers {

// On-policy advantage actor-critic with a mixed state value:
//   V_tot = value_mix(s, V_1..V_n), trained on TD(lambda) targets;
//   A_t = r_t + gamma V_tot(s_{t+1}) - V_tot(s_t);
//   policy loss = -mean sum_i log pi_i(u_i) A_t - coef * mean H(pi_i).
// Episodes are acted with pi mixed with epsilon uniform noise.
class VmixLearner : public Learner {
 public:
  VmixLearner(const TrainerConfig& cfg, const envs::Env& env, Rng& rng);

  rollout::PolicyFactory behaviour(double epsilon) const override;
  rollout::PolicyFactory greedy() const override;
  bool ready(const Buffers& buffers) const override;
  double update(const Buffers& buffers, Rng& rng) override;
  void update_targets() override {}
  std::size_t online_capacity() const override { return cfg_.workers; }
  bool uses_epsilon() const override { return true; }

  // Value targets and advantages [B,T] from the current critic.
  struct Signals {
    Tensor targets;
    Tensor advantages;
  };
  Signals signals(const rollout::EpisodeBatch& batch) const;

  struct LossTerms {
    ad::Var critic;
    ad::Var policy;
    ad::Var entropy;
    ad::Var total;
  };
  LossTerms loss(ad::Tape& tape, const nets::Bound& policy, const nets::Bound& value,
                 const nets::Bound& mixer, const rollout::EpisodeBatch& batch,
                 const Signals& signals) const;

  // Rejects batches collected before the latest update. Returns the critic loss.
  double train_step(const rollout::EpisodeBatch& batch);

  const TrainerConfig& config() const noexcept { return cfg_; }
  nets::AgentNet& policy() noexcept { return policy_; }
  nets::AgentNet& value() noexcept { return value_; }
  nets::ParamSet& mixer_params() noexcept { return mixer_.params(); }
  const mixers::MonotonicMixer& mixer() const noexcept { return mixer_; }

 private:
  TrainerConfig cfg_;
  std::size_t n_agents_;
  nets::AgentNet policy_;
  nets::AgentNet value_;
  mixers::MonotonicMixer mixer_;
  ParamGroup group_;
};

}  // namespace marl::trainers
