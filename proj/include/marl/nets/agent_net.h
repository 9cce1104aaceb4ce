#pragma once

#include <cstddef>
#include <span>

#include "marl/common/rng.h"
#include "marl/nets/layers.h"

namespace marl::nets {

struct AgentNetSpec {
  std::size_t obs_dim = 0;
  std::size_t n_actions = 0;
  std::size_t n_agents = 0;
  std::size_t hidden = 64;
  std::size_t out_dim = 0;  // 0: one output per action

  std::size_t input_dim() const { return obs_dim + n_actions + n_agents; }
  std::size_t outputs() const { return out_dim == 0 ? n_actions : out_dim; }
};

// Recurrent agent network shared by all agents:
// input [obs | last action one-hot | agent id one-hot] -> fc -> ReLU -> GRU -> fc.
class AgentNet {
 public:
  AgentNet(const AgentNetSpec& spec, Rng& rng);

  const AgentNetSpec& spec() const noexcept { return spec_; }
  ParamSet& params() noexcept { return params_; }
  const ParamSet& params() const noexcept { return params_; }

  static std::size_t parameter_count(const AgentNetSpec& spec);

  struct StepOut {
    ad::Var out;     // [R, outputs]
    ad::Var hidden;  // [R, hidden]
  };
  StepOut step(const Bound& p, ad::Var inputs, ad::Var hidden) const;

  // `inputs` holds `steps` time-major blocks of R rows; returns outputs in the
  // same layout. The hidden state starts at zero.
  ad::Var forward_sequence(const Bound& p, ad::Var inputs, std::size_t steps) const;

  // Same as forward_sequence on a private tape, keeping only one step of
  // intermediate values alive at a time. For target networks.
  Tensor evaluate_sequence(const Tensor& inputs, std::size_t steps) const;

 private:
  AgentNetSpec spec_;
  ParamSet params_;
  Linear input_;
  Gru gru_;
  Linear output_;
};

// Input rows for R = batch * n_agents agents, agent id = row % n_agents.
// last_actions[r] < 0 means "no previous action".
Tensor agent_inputs(const AgentNetSpec& spec, std::span<const double> obs,
                    std::span<const int> last_actions);

// Step-by-step evaluation with a carried hidden state, for acting.
class AgentRunner {
 public:
  explicit AgentRunner(const AgentNet& net);

  void reset(std::size_t rows);
  Tensor step(const Tensor& inputs);

 private:
  const AgentNet* net_;
  ad::Tape tape_;
  Bound bound_;
  std::size_t mark_ = 0;
  Tensor hidden_;
};

}  // namespace marl::nets
