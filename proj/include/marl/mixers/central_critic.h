#pragma once

#include <cstddef>

#include "marl/common/rng.h"
#include "marl/nets/layers.h"

namespace marl::mixers {

struct CentralCriticSpec {
  std::size_t n_agents = 0;
  std::size_t state_dim = 0;
  std::size_t embed = 32;
};

// Unconstrained joint-value estimate: MLP over [s | Q_1..Q_n] with two ReLU
// hidden layers of width embed.
class CentralCritic {
 public:
  CentralCritic(const CentralCriticSpec& spec, Rng& rng);

  // q [B,n] chosen utilities, s [B,state_dim] -> [B,1].
  ad::Var forward(const nets::Bound& p, ad::Var q, ad::Var s) const;

  const CentralCriticSpec& spec() const noexcept { return spec_; }
  nets::ParamSet& params() noexcept { return params_; }
  const nets::ParamSet& params() const noexcept { return params_; }

 private:
  CentralCriticSpec spec_;
  nets::ParamSet params_;
  nets::Linear l1_;
  nets::Linear l2_;
  nets::Linear l3_;
};

}  // namespace marl::mixers
