#include "marl/trainers/trainer.h"

#include <chrono>
#include <cmath>

#include "marl/common/error.h"
#include "marl/rollout/epsilon.h"
#include "marl/trainers/q_learner.h"
#include "marl/trainers/riit.h"
#include "marl/trainers/vmix.h"

namespace marl::trainers {

namespace {

std::uint64_t now_ms() {
  using namespace std::chrono;
  return static_cast<std::uint64_t>(
      duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count());
}

std::unique_ptr<envs::Env> checked_env(const RunConfig& cfg) {
  std::vector<std::string> issues = cfg.env.validate();
  for (auto& issue : cfg.trainer.validate()) issues.push_back(std::move(issue));
  if (cfg.eval_interval == 0) issues.push_back("eval_interval must be positive");
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return envs::make_env(cfg.env);
}

}  // namespace

std::unique_ptr<Learner> make_learner(const TrainerConfig& cfg, const envs::Env& env, Rng& rng) {
  if (is_value_based(cfg.algo)) return std::make_unique<QLearner>(cfg, env, rng);
  if (cfg.algo == Algo::kVmix) return std::make_unique<VmixLearner>(cfg, env, rng);
  return std::make_unique<RiitLearner>(cfg, env, rng);
}

EvalResult summarize(const std::vector<rollout::Episode>& episodes) {
  EvalResult r;
  if (episodes.empty()) return r;
  for (const auto& e : episodes) {
    r.return_mean += e.total_return();
    r.win_rate += e.won ? 1.0 : 0.0;
  }
  r.return_mean /= static_cast<double>(episodes.size());
  r.win_rate /= static_cast<double>(episodes.size());
  return r;
}

Trainer::Trainer(RunConfig cfg, TrainHooks hooks)
    : cfg_(std::move(cfg)),
      hooks_(std::move(hooks)),
      env_(checked_env(cfg_)),
      rng_(cfg_.seed),
      learner_(make_learner(cfg_.trainer, *env_, rng_)),
      workers_(*env_, cfg_.trainer.workers, cfg_.seed),
      buffers_{rollout::ReplayBuffer(cfg_.trainer.buffer_capacity),
               rollout::ReplayBuffer(learner_->online_capacity())},
      targets_(cfg_.trainer.target_update_interval) {}

EvalResult Trainer::evaluate() {
  return summarize(workers_.evaluate(learner_->greedy(), cfg_.test_episodes));
}

void Trainer::log_row(MetricLog& log, double loss, double epsilon) {
  const EvalResult eval = evaluate();
  MetricRow row;
  row.env_steps = env_steps_;
  row.episodes = episodes_;
  row.loss = loss;
  row.test_return_mean = eval.return_mean;
  row.test_win_rate = eval.win_rate;
  row.epsilon = epsilon;
  row.wall_ms = cfg_.trainer.log_wall_clock ? now_ms() - start_ms_ : 0;
  log.rows.push_back(row);
  if (!cfg_.log_path.empty()) log.save(cfg_.log_path);
}

MetricLog Trainer::run() {
  MetricLog log;
  log.config_hash = cfg_.config_hash;
  start_ms_ = now_ms();
  const std::uint64_t total = cfg_.trainer.total_env_steps;
  const std::uint64_t interval = cfg_.eval_interval;
  std::uint64_t next_eval = interval;
  double loss_sum = 0.0;
  std::size_t loss_count = 0;
  try {
    if (!cfg_.log_path.empty()) log.save(cfg_.log_path);
    while (env_steps_ < total) {
      const double epsilon =
          learner_->uses_epsilon() ? rollout::epsilon_at(cfg_.trainer.epsilon, env_steps_) : 0.0;
      std::vector<rollout::Episode> batch = workers_.collect(learner_->behaviour(epsilon));
      const std::uint64_t before = episodes_;
      for (rollout::Episode& e : batch) {
        e.policy_version = learner_->updates();
        env_steps_ += e.length();
        ++episodes_;
        buffers_.online.insert(e);
        buffers_.offline.insert(std::move(e));
      }
      if (learner_->ready(buffers_)) {
        loss_sum += learner_->update(buffers_, rng_);
        ++loss_count;
      }
      if (targets_.due(before, episodes_)) {
        learner_->update_targets();
        if (hooks_.on_target_copy) hooks_.on_target_copy(episodes_);
      }
      if (env_steps_ >= next_eval || env_steps_ >= total) {
        log_row(log, loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : std::nan(""),
                learner_->uses_epsilon()
                    ? rollout::epsilon_at(cfg_.trainer.epsilon, env_steps_)
                    : 0.0);
        loss_sum = 0.0;
        loss_count = 0;
        next_eval = (env_steps_ / interval + 1) * interval;
      }
    }
  } catch (...) {
    if (!cfg_.log_path.empty()) {
      try {
        log.save(cfg_.log_path);
      } catch (...) {
      }
    }
    throw;
  }
  return log;
}

MetricLog train(const RunConfig& cfg, const TrainHooks& hooks) {
  Trainer trainer(cfg, hooks);
  return trainer.run();
}

EvalResult random_baseline(const envs::EnvConfig& env_cfg, std::size_t episodes,
                           std::uint64_t seed) {
  const std::unique_ptr<envs::Env> env = envs::make_env(env_cfg);
  Rng rng(seed);
  rollout::RandomPolicy policy(env->n_actions());
  std::vector<rollout::Episode> out;
  for (std::size_t k = 0; k < episodes; ++k) out.push_back(rollout::run_episode(*env, policy, rng));
  return summarize(out);
}

}  // namespace marl::trainers
