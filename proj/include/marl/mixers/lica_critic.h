#pragma once

#include <cstddef>

#include "marl/common/rng.h"
#include "marl/nets/layers.h"

namespace marl::mixers {

struct LicaCriticSpec {
  std::size_t n_agents = 0;
  std::size_t n_actions = 0;
  std::size_t state_dim = 0;
  std::size_t embed = 32;
};

// Critic over the joint policy: hypernetworks on s produce the weights of a
// two-layer mixing net applied to [pi_1 | ... | pi_n]. No sign constraint.
//   y = W2(s)^T ReLU(W1(s)^T pi + b1(s)) + b2(s)
class LicaCritic {
 public:
  LicaCritic(const LicaCriticSpec& spec, Rng& rng);

  // policies [B, n*n_actions], each agent block a distribution; s [B,state_dim].
  ad::Var forward(const nets::Bound& p, ad::Var policies, ad::Var s) const;

  const LicaCriticSpec& spec() const noexcept { return spec_; }
  nets::ParamSet& params() noexcept { return params_; }
  const nets::ParamSet& params() const noexcept { return params_; }
  const nets::Linear& hyper_w1() const noexcept { return hyper_w1_; }
  const nets::Linear& hyper_b1() const noexcept { return hyper_b1_; }
  const nets::Linear& hyper_w2() const noexcept { return hyper_w2_; }
  const nets::TwoLayer& hyper_b2() const noexcept { return hyper_b2_; }

 private:
  LicaCriticSpec spec_;
  nets::ParamSet params_;
  nets::Linear hyper_w1_;
  nets::Linear hyper_b1_;
  nets::Linear hyper_w2_;
  nets::TwoLayer hyper_b2_;
};

ad::Var lica_critic_eval(const LicaCritic& critic, const nets::Bound& p, ad::Var policies,
                         ad::Var s);

}  // namespace marl::mixers
