#pragma once

#include <optional>

#include "marl/mixers/lica_critic.h"
#include "marl/mixers/monotonic_mixer.h"
#include "marl/nets/agent_net.h"
#include "marl/rollout/episode.h"
#include "marl/trainers/learner.h"

namespace marl::trainers {

// Two-stage actor-critic. The critic mixes per-agent utilities Q_i with a
// MonotonicMixer (RIIT), or maps the joint policy directly through a
// LicaCritic (LICA). Each update runs
//   1. critic regression on an offline batch, one-step targets whose next
//      actions are sampled from the current policies;
//   2. critic regression on the online batch with TD(lambda) targets;
//   3. a policy step maximizing the critic plus adaptive entropy.
class RiitLearner : public Learner {
 public:
  RiitLearner(const TrainerConfig& cfg, const envs::Env& env, Rng& rng);

  rollout::PolicyFactory behaviour(double epsilon) const override;
  rollout::PolicyFactory greedy() const override;
  bool ready(const Buffers& buffers) const override;
  double update(const Buffers& buffers, Rng& rng) override;
  void update_targets() override;
  std::size_t online_capacity() const override { return cfg_.online_batch_size; }
  bool uses_epsilon() const override { return false; }

  struct Losses {
    double critic_offline = 0.0;
    double critic_online = 0.0;
    double policy = 0.0;   // -mean Q_tot under the policies
    double entropy = 0.0;  // mean per-agent policy entropy
  };
  Losses train_step(const rollout::EpisodeBatch& offline, const rollout::EpisodeBatch& online,
                    Rng& rng);

  // Targets [B,T] from the target critic.
  Tensor offline_targets(const rollout::EpisodeBatch& batch, Rng& rng) const;
  Tensor online_targets(const rollout::EpisodeBatch& batch, Rng& rng) const;

  // Masked critic MSE for live critic parameters. `utility` is empty for LICA.
  ad::Var critic_loss(ad::Tape& tape, const nets::Bound& utility, const nets::Bound& critic,
                      const rollout::EpisodeBatch& batch, const Tensor& targets) const;

  struct PolicyTerms {
    ad::Var q;        // -mean Q_tot(s, pi_1..pi_n)
    ad::Var entropy;  // mean over steps and agents of H(pi_i)
  };
  // Policy objective pieces; the critic enters as constants.
  PolicyTerms policy_terms(ad::Tape& tape, const nets::Bound& policy,
                           const rollout::EpisodeBatch& batch) const;

  // grad(q) - coef * grad(H) / |grad(H)|: the entropy gradient is rescaled to
  // unit L2 norm over all policy parameters before weighting.
  static std::vector<Tensor> adaptive_entropy(const std::vector<Tensor>& q_grads,
                                              const std::vector<Tensor>& entropy_grads,
                                              double coef);

  // Live critic value [rows,1] for utilities q [rows*n, A] weighted by
  // w [rows*n, A] (one-hot actions or policies); LICA ignores q.
  Tensor critic_values(const Tensor& q, const Tensor& w, const Tensor& s) const;

  bool lica() const noexcept { return lica_.has_value(); }
  const TrainerConfig& config() const noexcept { return cfg_; }
  nets::AgentNet& policy() noexcept { return policy_; }
  const nets::AgentNet& policy() const noexcept { return policy_; }
  nets::ParamSet& utility_params() noexcept { return utility_.params(); }
  nets::ParamSet& critic_params() noexcept;
  const nets::ParamSet& critic_params() const noexcept;
  const nets::ParamSet& target_critic_params() const noexcept;

 private:
  // Critic value [rows,1] for action weights w [rows*n, A] (one-hot actions
  // or policies) given utilities q [rows*n, A] (ignored by LICA).
  ad::Var critic_value(bool target, const nets::Bound& p, ad::Var q, ad::Var w,
                       ad::Var s) const;
  double critic_update(const rollout::EpisodeBatch& batch, const Tensor& targets);
  Tensor next_values(const rollout::EpisodeBatch& batch, bool recorded, Rng& rng) const;

  TrainerConfig cfg_;
  std::size_t n_agents_;
  std::size_t n_actions_;
  nets::AgentNet policy_;
  nets::AgentNet utility_;
  nets::AgentNet target_utility_;
  std::optional<mixers::MonotonicMixer> mixer_;
  std::optional<mixers::MonotonicMixer> target_mixer_;
  std::optional<mixers::LicaCritic> lica_;
  std::optional<mixers::LicaCritic> target_lica_;
  ParamGroup critic_group_;
  ParamGroup policy_group_;
};

}  // namespace marl::trainers
