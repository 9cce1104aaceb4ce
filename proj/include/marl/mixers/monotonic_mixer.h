#pragma once

#include <cstddef>

#include "marl/common/rng.h"
#include "marl/nets/layers.h"

namespace marl::mixers {

struct MonotonicMixerSpec {
  std::size_t n_agents = 0;
  std::size_t state_dim = 0;
  std::size_t embed = 32;
  bool constrain = true;  // absolute value on the produced weights
};

// QMIX-style mixing network. Hypernetworks conditioned on the state produce
//   W1 [n x E] (linear), b1 [E] (linear), W2 [E] (linear), b2 (two-layer)
// and y = W2^T ELU(W1^T x + b1) + b2, with |W1|, |W2| when constrained.
class MonotonicMixer {
 public:
  MonotonicMixer(const MonotonicMixerSpec& spec, Rng& rng);

  // x [B,n] agent utilities (or state values), s [B,state_dim] -> [B,1].
  ad::Var forward(const nets::Bound& p, ad::Var x, ad::Var s) const;

  const MonotonicMixerSpec& spec() const noexcept { return spec_; }
  nets::ParamSet& params() noexcept { return params_; }
  const nets::ParamSet& params() const noexcept { return params_; }
  const nets::Linear& hyper_w1() const noexcept { return hyper_w1_; }
  const nets::Linear& hyper_b1() const noexcept { return hyper_b1_; }
  const nets::Linear& hyper_w2() const noexcept { return hyper_w2_; }
  const nets::TwoLayer& hyper_b2() const noexcept { return hyper_b2_; }

 private:
  MonotonicMixerSpec spec_;
  nets::ParamSet params_;
  nets::Linear hyper_w1_;
  nets::Linear hyper_b1_;
  nets::Linear hyper_w2_;
  nets::TwoLayer hyper_b2_;
};

// Q_tot for chosen agent utilities.
ad::Var qmix_mix(const MonotonicMixer& mixer, const nets::Bound& p, ad::Var q, ad::Var s);
// V_tot for agent state values; same network.
ad::Var value_mix(const MonotonicMixer& mixer, const nets::Bound& p, ad::Var v, ad::Var s);

}  // namespace marl::mixers
