#pragma once

#include <optional>
#include <vector>

#include "marl/mixers/central_critic.h"
#include "marl/mixers/monotonic_mixer.h"
#include "marl/mixers/qatten.h"
#include "marl/mixers/qplex.h"
#include "marl/nets/agent_net.h"
#include "marl/rollout/episode.h"
#include "marl/trainers/learner.h"

namespace marl::trainers {

// Value-based learner for VDN, QMIX, Qatten, QPLEX and OW-QMIX: recurrent
// agent utilities, a mixer, and Peng's Q(lambda) targets from target networks.
class QLearner : public Learner {
 public:
  QLearner(const TrainerConfig& cfg, const envs::Env& env, Rng& rng);

  rollout::PolicyFactory behaviour(double epsilon) const override;
  rollout::PolicyFactory greedy() const override;
  bool ready(const Buffers& buffers) const override;
  double update(const Buffers& buffers, Rng& rng) override;
  void update_targets() override;
  std::size_t online_capacity() const override { return 1; }
  bool uses_epsilon() const override { return true; }

  // Targets [B,T] computed from the target networks alone.
  Tensor build_targets(const rollout::EpisodeBatch& batch) const;

  // Masked TD loss for the given live parameters (plus the central critic's
  // regression loss for OW-QMIX). Throws when the mask is empty.
  ad::Var loss(ad::Tape& tape, const nets::Bound& agent, const nets::Bound& mixer,
               const nets::Bound& central, const rollout::EpisodeBatch& batch,
               const Tensor& targets) const;

  // One optimizer step on `batch`; returns the loss before the step.
  double train_step(const rollout::EpisodeBatch& batch);

  // Per-agent utilities [n, A] at a first decision point.
  Tensor agent_values(std::span<const double> obs) const;
  // Q_tot for every joint action at a first decision point, [A^n, 1].
  // Joint action j has agent 0 as its most significant digit.
  Tensor joint_values(std::span<const double> state, std::span<const double> obs) const;

  const TrainerConfig& config() const noexcept { return cfg_; }
  nets::AgentNet& agent() noexcept { return agent_; }
  const nets::AgentNet& agent() const noexcept { return agent_; }
  const nets::AgentNet& target_agent() const noexcept { return target_agent_; }
  nets::ParamSet& mixer_params() noexcept;
  const nets::ParamSet& mixer_params() const noexcept;
  const nets::ParamSet& target_mixer_params() const noexcept;
  nets::ParamSet& central_params() noexcept;
  const nets::ParamSet& central_params() const noexcept;

 private:
  struct Mixers {
    std::optional<mixers::MonotonicMixer> qmix;
    std::optional<mixers::QattenMixer> qatten;
    std::optional<mixers::QplexMixer> qplex;
    std::optional<mixers::CentralCritic> central;
    nets::ParamSet empty;

    nets::ParamSet& params();
    const nets::ParamSet& params() const;
    nets::ParamSet& central_params();
    const nets::ParamSet& central_params() const;
  };

  // Q_tot [R,1] for utilities q_all [R*n, A] and chosen actions.
  ad::Var mix(const Mixers& m, const nets::Bound& p, ad::Var q_all,
              const std::vector<std::size_t>& chosen, ad::Var s, ad::Var feats) const;

  TrainerConfig cfg_;
  std::size_t n_agents_;
  std::size_t n_actions_;
  nets::AgentNet agent_;
  nets::AgentNet target_agent_;
  Mixers live_;
  Mixers target_;
  ParamGroup group_;
};

}  // namespace marl::trainers
