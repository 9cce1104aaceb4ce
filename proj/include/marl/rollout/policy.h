#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "marl/common/rng.h"
#include "marl/nets/agent_net.h"

namespace marl::rollout {

// Decentralized acting rule for all agents of one environment.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void reset(std::size_t n_agents) = 0;
  // obs: n_agents * obs_dim values; last_actions: -1 at the first step.
  virtual std::vector<int> act(std::span<const double> obs, std::span<const int> last_actions,
                               Rng& rng) = 0;
};

// Epsilon-greedy over the utilities of a recurrent agent network.
class GreedyPolicy : public Policy {
 public:
  GreedyPolicy(const nets::AgentNet& net, double epsilon);
  void reset(std::size_t n_agents) override;
  std::vector<int> act(std::span<const double> obs, std::span<const int> last_actions,
                       Rng& rng) override;

 private:
  const nets::AgentNet* net_;
  nets::AgentRunner runner_;
  double epsilon_;
};

// Softmax over the network outputs; samples, or takes the argmax when greedy.
// With epsilon > 0 samples from (1 - epsilon) pi + epsilon / n_actions.
class SoftmaxPolicy : public Policy {
 public:
  SoftmaxPolicy(const nets::AgentNet& net, bool greedy, double epsilon = 0.0);
  void reset(std::size_t n_agents) override;
  std::vector<int> act(std::span<const double> obs, std::span<const int> last_actions,
                       Rng& rng) override;

 private:
  const nets::AgentNet* net_;
  nets::AgentRunner runner_;
  bool greedy_;
  double epsilon_;
};

// Uniform random actions.
class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(std::size_t n_actions) : n_actions_(n_actions) {}
  void reset(std::size_t n_agents) override { n_agents_ = n_agents; }
  std::vector<int> act(std::span<const double> obs, std::span<const int> last_actions,
                       Rng& rng) override;

 private:
  std::size_t n_actions_;
  std::size_t n_agents_ = 0;
};

// Fixed open-loop rule, for fixtures.
class ScriptedPolicy : public Policy {
 public:
  using Fn = std::function<std::vector<int>(std::span<const double> obs, Rng& rng)>;
  explicit ScriptedPolicy(Fn fn) : fn_(std::move(fn)) {}
  void reset(std::size_t) override {}
  std::vector<int> act(std::span<const double> obs, std::span<const int>, Rng& rng) override {
    return fn_(obs, rng);
  }

 private:
  Fn fn_;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

}  // namespace marl::rollout
