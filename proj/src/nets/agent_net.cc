#include "marl/nets/agent_net.h"

#include <algorithm>

#include "marl/autodiff/ops.h"
#include "marl/common/error.h"

namespace marl::nets {

AgentNet::AgentNet(const AgentNetSpec& spec, Rng& rng) : spec_(spec) {
  if (spec.n_actions == 0 || spec.n_agents == 0) {
    throw Error("agent network needs at least one action and one agent");
  }
  input_ = Linear(params_, "fc1", spec.input_dim(), spec.hidden, rng);
  gru_ = Gru(params_, "rnn", spec.hidden, spec.hidden, rng);
  output_ = Linear(params_, "fc2", spec.hidden, spec.outputs(), rng);
}

std::size_t AgentNet::parameter_count(const AgentNetSpec& spec) {
  const std::size_t h = spec.hidden;
  return spec.input_dim() * h + h + 3 * (2 * h * h + h) + h * spec.outputs() + spec.outputs();
}

AgentNet::StepOut AgentNet::step(const Bound& p, ad::Var inputs, ad::Var hidden) const {
  if (inputs.cols() != spec_.input_dim()) {
    throw ShapeError("agent network expects " + std::to_string(spec_.input_dim()) +
                     " input columns, got " + ad::to_string(inputs.shape()));
  }
  ad::Var x = ad::relu(input_(p, inputs));
  ad::Var h = gru_(p, x, hidden);
  return {output_(p, h), h};
}

ad::Var AgentNet::forward_sequence(const Bound& p, ad::Var inputs, std::size_t steps) const {
  if (steps == 0 || inputs.rows() % steps != 0) {
    throw ShapeError("forward_sequence: " + ad::to_string(inputs.shape()) + " is not " +
                     std::to_string(steps) + " equal time blocks");
  }
  const std::size_t rows = inputs.rows() / steps;
  ad::Tape& tape = *inputs.tape();
  ad::Var h = tape.constant(Tensor({rows, spec_.hidden}));
  std::vector<ad::Var> outs;
  outs.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    StepOut s = step(p, ad::slice_rows(inputs, t * rows, rows), h);
    outs.push_back(s.out);
    h = s.hidden;
  }
  return steps == 1 ? outs[0] : ad::concat_rows(outs);
}

Tensor AgentNet::evaluate_sequence(const Tensor& inputs, std::size_t steps) const {
  if (steps == 0 || inputs.rows() % steps != 0) {
    throw ShapeError("evaluate_sequence: " + ad::to_string(inputs.shape()) + " is not " +
                     std::to_string(steps) + " equal time blocks");
  }
  const std::size_t rows = inputs.rows() / steps;
  const std::size_t in = inputs.cols();
  ad::Tape tape;
  const Bound p = bind_constant(tape, params_);
  const std::size_t mark = tape.size();
  Tensor result({inputs.rows(), spec_.outputs()});
  Tensor hidden({rows, spec_.hidden});
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor block({rows, in});
    std::copy_n(inputs.data() + t * rows * in, rows * in, block.data());
    StepOut s = step(p, tape.constant(std::move(block)), tape.constant(std::move(hidden)));
    std::copy_n(s.out.value().data(), rows * spec_.outputs(),
                result.data() + t * rows * spec_.outputs());
    hidden = s.hidden.value();
    tape.truncate(mark);
  }
  return result;
}

Tensor agent_inputs(const AgentNetSpec& spec, std::span<const double> obs,
                    std::span<const int> last_actions) {
  const std::size_t rows = last_actions.size();
  if (obs.size() != rows * spec.obs_dim) {
    throw ShapeError("agent_inputs: " + std::to_string(obs.size()) + " observation values for " +
                     std::to_string(rows) + " rows of width " + std::to_string(spec.obs_dim));
  }
  const std::size_t width = spec.input_dim();
  Tensor t({rows, width});
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = t.data() + r * width;
    std::copy_n(obs.data() + r * spec.obs_dim, spec.obs_dim, row);
    const int a = last_actions[r];
    if (a >= 0) {
      if (static_cast<std::size_t>(a) >= spec.n_actions) throw Error("agent_inputs: action out of range");
      row[spec.obs_dim + a] = 1.0;
    }
    row[spec.obs_dim + spec.n_actions + r % spec.n_agents] = 1.0;
  }
  return t;
}

AgentRunner::AgentRunner(const AgentNet& net) : net_(&net) {
  bound_ = bind_constant(tape_, net.params());
  mark_ = tape_.size();
}

void AgentRunner::reset(std::size_t rows) { hidden_ = Tensor({rows, net_->spec().hidden}); }

Tensor AgentRunner::step(const Tensor& inputs) {
  if (hidden_.empty() || hidden_.rows() != inputs.rows()) reset(inputs.rows());
  AgentNet::StepOut s = net_->step(bound_, tape_.constant(inputs), tape_.constant(hidden_));
  Tensor out = s.out.value();
  hidden_ = s.hidden.value();
  tape_.truncate(mark_);
  return out;
}

}  // namespace marl::nets
