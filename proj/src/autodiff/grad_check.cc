#include "marl/autodiff/grad_check.h"

#include <algorithm>
#include <cmath>

#include "marl/common/error.h"

namespace marl::ad {
namespace {

struct Probe {
  double value;
  std::uint64_t signature;
};

Probe evaluate(const LossFn& f, const std::vector<Tensor>& inputs) {
  Tape tape;
  tape.set_track_branches(true);
  std::vector<Var> leaves;
  leaves.reserve(inputs.size());
  for (const Tensor& t : inputs) leaves.push_back(tape.leaf(t));
  const Var loss = f(tape, leaves);
  return {loss.value().item(), tape.branch_signature()};
}

}  // namespace

GradCheckResult grad_check(const LossFn& f, std::vector<Tensor> inputs, double h) {
  Tape tape;
  tape.set_track_branches(true);
  std::vector<Var> leaves;
  for (const Tensor& t : inputs) leaves.push_back(tape.leaf(t));
  const Var loss = f(tape, leaves);
  const std::uint64_t base_signature = tape.branch_signature();
  const Gradients grads = tape.backward(loss);

  GradCheckResult result;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Tensor analytic = grads[leaves[k]];
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const double saved = inputs[k][i];
      inputs[k][i] = saved + h;
      const Probe plus = evaluate(f, inputs);
      inputs[k][i] = saved - h;
      const Probe minus = evaluate(f, inputs);
      inputs[k][i] = saved;
      if (plus.signature != base_signature || minus.signature != base_signature) {
        ++result.skipped;
        continue;
      }
      const double numeric = (plus.value - minus.value) / (2.0 * h);
      const double err = std::fabs(analytic[i] - numeric) / std::max(1.0, std::fabs(analytic[i]));
      result.max_error = std::max(result.max_error, err);
      ++result.checked;
    }
  }
  return result;
}

double grad_check(const std::function<Var(Tape&, Var)>& f, const Tensor& x, double h) {
  const LossFn wrapped = [&f](Tape& tape, std::span<const Var> in) { return f(tape, in[0]); };
  return grad_check(wrapped, {x}, h).max_error;
}

}  // namespace marl::ad
