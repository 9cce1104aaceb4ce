#include "marl/rollout/policy.h"

#include <cmath>

#include "marl/rollout/select.h"

namespace marl::rollout {

GreedyPolicy::GreedyPolicy(const nets::AgentNet& net, double epsilon)
    : net_(&net), runner_(net), epsilon_(epsilon) {}

void GreedyPolicy::reset(std::size_t n_agents) { runner_.reset(n_agents); }

std::vector<int> GreedyPolicy::act(std::span<const double> obs,
                                   std::span<const int> last_actions, Rng& rng) {
  const ad::Tensor q = runner_.step(nets::agent_inputs(net_->spec(), obs, last_actions));
  return select_actions(q, epsilon_, SelectMode::kGreedy, rng);
}

SoftmaxPolicy::SoftmaxPolicy(const nets::AgentNet& net, bool greedy, double epsilon)
    : net_(&net), runner_(net), greedy_(greedy), epsilon_(epsilon) {}

void SoftmaxPolicy::reset(std::size_t n_agents) { runner_.reset(n_agents); }

std::vector<int> SoftmaxPolicy::act(std::span<const double> obs,
                                    std::span<const int> last_actions, Rng& rng) {
  ad::Tensor logits = runner_.step(nets::agent_inputs(net_->spec(), obs, last_actions));
  if (greedy_) return select_actions(logits, 0.0, SelectMode::kGreedy, rng);
  const std::size_t n = logits.cols();
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    double* row = logits.data() + r * n;
    double hi = row[0];
    for (std::size_t a = 1; a < n; ++a) hi = std::max(hi, row[a]);
    double total = 0.0;
    for (std::size_t a = 0; a < n; ++a) total += row[a] = std::exp(row[a] - hi);
    const double noise = epsilon_ / static_cast<double>(n);
    for (std::size_t a = 0; a < n; ++a) row[a] = (1.0 - epsilon_) * row[a] / total + noise;
  }
  return select_actions(logits, 0.0, SelectMode::kSample, rng);
}

std::vector<int> RandomPolicy::act(std::span<const double>, std::span<const int>, Rng& rng) {
  std::vector<int> actions(n_agents_);
  for (int& a : actions) a = static_cast<int>(uniform_index(rng, n_actions_));
  return actions;
}

}  // namespace marl::rollout
