#pragma once

#include "marl/autodiff/tensor.h"

// Bootstrapped targets over padded episode batches. Every argument is a
// [B,T] array; row b is one episode whose valid steps form a prefix
// (mask 1), and targets at padded steps are 0. `bootstrap_t` / `next_t` is
// the value of the state reached after step t.
namespace marl::returns {

using ad::Tensor;

enum class TargetKind { kOneStep, kTdLambda, kPengQLambda };

struct TargetSpec {
  TargetKind kind = TargetKind::kPengQLambda;
  double lambda = 0.6;
  double gamma = 0.99;

  void validate() const;  // lambda in [0,1], gamma in [0,1)
};

// y_t = r_t + gamma (1 - terminated_t) bootstrap_t.
Tensor one_step_targets(const Tensor& r, const Tensor& bootstrap, const Tensor& terminated,
                        const Tensor& mask, double gamma);

// G_t = r_t + gamma (1 - terminated_t) [(1 - lambda) next_t + lambda G_{t+1}],
// with G_{t+1} := next_t at the last valid step, so a time-limit truncation
// bootstraps from the value estimate.
Tensor lambda_targets(const Tensor& r, const Tensor& next, const Tensor& terminated,
                      const Tensor& mask, double lambda, double gamma);

// Peng's Q(lambda): `max_q_next` is the target network's greedy joint value.
Tensor peng_q_lambda_targets(const Tensor& r, const Tensor& max_q_next, const Tensor& terminated,
                             const Tensor& mask, double lambda, double gamma);

// TD(lambda) with a state-value bootstrap.
Tensor td_lambda_targets(const Tensor& r, const Tensor& v_next, const Tensor& terminated,
                         const Tensor& mask, double lambda, double gamma);

Tensor targets(const TargetSpec& spec, const Tensor& r, const Tensor& next,
               const Tensor& terminated, const Tensor& mask);

}  // namespace marl::returns
