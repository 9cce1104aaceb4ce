#pragma once

#include <vector>

#include "marl/autodiff/tensor.h"
#include "marl/common/rng.h"

namespace marl::rollout {

enum class SelectMode {
  kGreedy,  // epsilon-greedy over values
  kSample,  // categorical sample from per-agent distributions
};

// Index of the largest entry of row `r`; ties go to the lowest index.
int argmax_row(const ad::Tensor& values, std::size_t r);

// One action per row of `values` [n_agents, n_actions].
// kGreedy: uniform random with probability epsilon, else argmax.
// kSample: each row must be a distribution; epsilon is ignored.
std::vector<int> select_actions(const ad::Tensor& values, double epsilon, SelectMode mode,
                                Rng& rng);

}  // namespace marl::rollout
