#pragma once

#include <cstddef>
#include <vector>

#include "marl/common/rng.h"
#include "marl/nets/layers.h"

namespace marl::mixers {

struct QattenSpec {
  std::size_t n_agents = 0;
  std::size_t state_dim = 0;
  std::size_t agent_dim = 0;  // per-agent feature width (the agent's observation)
  std::size_t embed = 32;
  std::size_t heads = 4;
  bool constrain = true;  // absolute value on the head weights w_h
};

// Multi-head attention mixer:
//   Q_tot = c(s) + sum_h w_h(s) sum_i lambda_{i,h} Q_i
//   lambda_{.,h} = softmax_i(e_i^T W_k,h^T W_q,h e_s)
// e_s, e_i are single linear embeddings of the state and agent features.
class QattenMixer {
 public:
  QattenMixer(const QattenSpec& spec, Rng& rng);

  // q [B,n], s [B,state_dim], agent_features [B*n, agent_dim] -> [B,1].
  ad::Var forward(const nets::Bound& p, ad::Var q, ad::Var s, ad::Var agent_features) const;
  // Attention coefficients of head h, [B,n].
  ad::Var attention(const nets::Bound& p, std::size_t head, ad::Var s,
                    ad::Var agent_features) const;

  const QattenSpec& spec() const noexcept { return spec_; }
  nets::ParamSet& params() noexcept { return params_; }
  const nets::ParamSet& params() const noexcept { return params_; }
  std::size_t query_index(std::size_t head) const { return w_q_[head]; }
  std::size_t key_index(std::size_t head) const { return w_k_[head]; }
  const nets::Linear& head_weights() const noexcept { return w_head_; }
  const nets::TwoLayer& constant_head() const noexcept { return c_; }

 private:
  ad::Var attention_from(const nets::Bound& p, std::size_t head, ad::Var e_s, ad::Var e_i) const;

  QattenSpec spec_;
  nets::ParamSet params_;
  nets::Linear e_s_;
  nets::Linear e_i_;
  std::vector<std::size_t> w_q_;
  std::vector<std::size_t> w_k_;
  nets::Linear w_head_;
  nets::TwoLayer c_;
};

ad::Var qatten_mix(const QattenMixer& mixer, const nets::Bound& p, ad::Var q, ad::Var s,
                   ad::Var agent_features);

}  // namespace marl::mixers
