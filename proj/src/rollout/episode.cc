#include "marl/rollout/episode.h"

#include <algorithm>
#include <numeric>

#include "marl/common/error.h"

namespace marl::rollout {

double Episode::total_return() const {
  return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

EpisodeBatch make_batch(std::span<const Episode* const> episodes) {
  if (episodes.empty()) throw Error("make_batch: no episodes");
  const Episode& first = *episodes.front();
  EpisodeBatch out;
  out.batch = episodes.size();
  out.n_agents = first.n_agents;
  out.n_actions = first.n_actions;
  for (const Episode* e : episodes) {
    if (e->n_agents != first.n_agents || e->obs_dim != first.obs_dim ||
        e->state_dim != first.state_dim || e->n_actions != first.n_actions) {
      throw Error("make_batch: episodes come from different environments");
    }
    if (e->length() == 0) throw Error("make_batch: empty episode");
    out.steps = std::max(out.steps, e->length());
  }
  const std::size_t B = out.batch;
  const std::size_t T = out.steps;
  const std::size_t n = out.n_agents;

  out.states = ad::Tensor({(T + 1) * B, first.state_dim});
  out.obs = ad::Tensor({(T + 1) * B * n, first.obs_dim});
  out.actions.assign(T * B * n, 0);
  out.reward = ad::Tensor({B, T});
  out.terminated = ad::Tensor({B, T});
  out.mask = ad::Tensor({B, T});

  for (std::size_t b = 0; b < B; ++b) {
    const Episode& e = *episodes[b];
    const std::size_t len = e.length();
    out.lengths.push_back(len);
    out.policy_versions.push_back(e.policy_version);
    for (std::size_t t = 0; t <= len; ++t) {
      std::copy(e.states[t].begin(), e.states[t].end(),
                out.states.data() + (t * B + b) * first.state_dim);
      std::copy(e.obs[t].begin(), e.obs[t].end(),
                out.obs.data() + (t * B + b) * n * first.obs_dim);
    }
    for (std::size_t t = 0; t < len; ++t) {
      std::copy(e.actions[t].begin(), e.actions[t].end(),
                out.actions.begin() + static_cast<std::ptrdiff_t>((t * B + b) * n));
      out.reward.data()[b * T + t] = e.rewards[t];
      out.mask.data()[b * T + t] = 1.0;
    }
    if (e.terminated) out.terminated.data()[b * T + len - 1] = 1.0;
  }
  return out;
}

}  // namespace marl::rollout
