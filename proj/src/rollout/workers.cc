#include "marl/rollout/workers.h"

#include <exception>
#include <thread>

#include "marl/common/error.h"

namespace marl::rollout {

Episode run_episode(envs::Env& env, Policy& policy, Rng& rng) {
  Episode ep;
  ep.n_agents = env.n_agents();
  ep.n_actions = env.n_actions();
  ep.obs_dim = env.obs_dim();
  ep.state_dim = env.state_dim();

  auto observe_all = [&] {
    std::vector<double> obs;
    obs.reserve(ep.n_agents * ep.obs_dim);
    for (std::size_t i = 0; i < ep.n_agents; ++i) {
      const std::vector<double> o = env.observe(i);
      obs.insert(obs.end(), o.begin(), o.end());
    }
    return obs;
  };

  env.reset(rng);
  policy.reset(ep.n_agents);
  std::vector<int> last(ep.n_agents, -1);
  ep.states.push_back(env.global_state());
  ep.obs.push_back(observe_all());
  for (;;) {
    std::vector<int> actions = policy.act(ep.obs.back(), last, rng);
    envs::StepResult r;
    try {
      r = env.step(actions);
    } catch (const Error& e) {
      throw Error(env.name() + " step " + std::to_string(ep.length()) + ": " + e.what());
    }
    ep.actions.push_back(actions);
    ep.rewards.push_back(r.reward);
    ep.states.push_back(env.global_state());
    ep.obs.push_back(observe_all());
    last = std::move(actions);
    if (r.done()) {
      ep.terminated = r.terminated;
      ep.truncated = r.truncated && !r.terminated;
      ep.won = r.won;
      return ep;
    }
  }
}

namespace {
constexpr std::uint64_t kEvalStream = 0x9e3779b97f4a7c15ULL;
}

RolloutWorkers::RolloutWorkers(const envs::Env& prototype, std::size_t workers,
                               std::uint64_t seed) {
  if (workers == 0) throw Error("at least one rollout worker is required");
  for (std::size_t w = 0; w < workers; ++w) {
    envs_.push_back(prototype.clone());
    train_rng_.emplace_back(worker_seed(seed, w));
    eval_rng_.emplace_back(worker_seed(seed, w) ^ kEvalStream);
  }
}

std::vector<Episode> RolloutWorkers::collect(const PolicyFactory& make_policy) {
  return run(make_policy, train_rng_, envs_.size());
}

std::vector<Episode> RolloutWorkers::evaluate(const PolicyFactory& make_policy,
                                              std::size_t count) {
  return run(make_policy, eval_rng_, count);
}

std::vector<Episode> RolloutWorkers::run(const PolicyFactory& make_policy,
                                         std::vector<Rng>& streams, std::size_t count) {
  const std::size_t W = envs_.size();
  std::vector<Episode> out(count);
  std::vector<std::exception_ptr> errors(W);
  auto work = [&](std::size_t w) {
    try {
      std::unique_ptr<Policy> policy = make_policy();
      for (std::size_t k = w; k < count; k += W) {
        out[k] = run_episode(*envs_[w], *policy, streams[w]);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (W == 1 || count <= 1) {
    for (std::size_t w = 0; w < W; ++w) work(w);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < W; ++w) threads.emplace_back(work, w);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace marl::rollout
