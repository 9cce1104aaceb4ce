#pragma once

#include <cstddef>
#include <span>

#include "marl/common/rng.h"
#include "marl/nets/layers.h"

namespace marl::mixers {

struct QplexSpec {
  std::size_t n_agents = 0;
  std::size_t n_actions = 0;
  std::size_t state_dim = 0;
  std::size_t embed = 32;
  bool constrain = true;  // absolute value on the advantage weights
};

// Dueling mixer: V_i = max_u Q_i, A_i = Q_i(u_i) - V_i,
//   A_tot = sum_i |w_i(s)| A_i + b(s),  V_tot = MLP(s, V_1..V_n),
//   Q_tot = V_tot + A_tot.
class QplexMixer {
 public:
  QplexMixer(const QplexSpec& spec, Rng& rng);

  struct Output {
    ad::Var q_tot;  // [B,1]
    ad::Var v_tot;
    ad::Var a_tot;
  };
  // q_all [B*n, n_actions] (row b*n+i is agent i of batch element b),
  // chosen [B*n] action indices, s [B,state_dim].
  Output forward(const nets::Bound& p, ad::Var q_all, std::span<const std::size_t> chosen,
                 ad::Var s) const;

  // A_tot for advantages a [B,n].
  ad::Var advantage_mix(const nets::Bound& p, ad::Var a, ad::Var s) const;
  // V_tot for state values v [B,n].
  ad::Var value_head(const nets::Bound& p, ad::Var v, ad::Var s) const;

  const QplexSpec& spec() const noexcept { return spec_; }
  nets::ParamSet& params() noexcept { return params_; }
  const nets::ParamSet& params() const noexcept { return params_; }
  const nets::Linear& advantage_weights() const noexcept { return w_adv_; }
  const nets::Linear& advantage_bias() const noexcept { return b_adv_; }

 private:
  QplexSpec spec_;
  nets::ParamSet params_;
  nets::Linear w_adv_;
  nets::Linear b_adv_;
  nets::TwoLayer value_;
};

ad::Var qplex_mix(const QplexMixer& mixer, const nets::Bound& p, ad::Var q_all,
                  std::span<const std::size_t> chosen, ad::Var s);

}  // namespace marl::mixers
