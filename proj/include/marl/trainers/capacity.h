#pragma once

#include <cstdint>

#include "marl/autodiff/tensor.h"
#include "marl/envs/matrix_game.h"

namespace marl::trainers {

struct CapacityConfig {
  std::size_t embed = 32;
  bool constrain = true;
  std::size_t iterations = 5000;
  double lr = 0.01;
  std::uint64_t seed = 1;
};

struct CapacityResult {
  double mse = 0.0;
  ad::Tensor q_tot;  // [A, A], row u1, column u2
};

// Regresses free per-agent utility tables through a QMIX mixer (state [0])
// onto a two-player payoff table with full-batch Adam. Reports the final
// mean squared error over all joint actions.
CapacityResult fit_payoff(const envs::Payoff& payoff, const CapacityConfig& cfg);

}  // namespace marl::trainers
