#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "marl/autodiff/tape.h"

namespace marl::ad {

// Builds a scalar loss on `tape` from leaves holding the checked inputs.
using LossFn = std::function<Var(Tape& tape, std::span<const Var> inputs)>;

struct GradCheckResult {
  double max_error = 0.0;  // max |analytic - central| / max(1, |analytic|)
  std::size_t checked = 0;
  std::size_t skipped = 0;  // coordinates whose +-h probes cross a kink
};

// Compares backward() against central differences for every coordinate of
// every input. A coordinate is skipped when either probe changes the branch
// taken by a non-smooth op (relu, abs, row_max).
GradCheckResult grad_check(const LossFn& f, std::vector<Tensor> inputs, double h = 1e-5);

double grad_check(const std::function<Var(Tape&, Var)>& f, const Tensor& x, double h = 1e-5);

}  // namespace marl::ad
