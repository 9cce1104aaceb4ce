#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "marl/envs/env_config.h"
#include "marl/rollout/workers.h"
#include "marl/trainers/learner.h"
#include "marl/trainers/metric_log.h"
#include "marl/trainers/target_schedule.h"

namespace marl::trainers {

struct RunConfig {
  envs::EnvConfig env;
  TrainerConfig trainer;
  std::uint64_t seed = 1;
  std::uint64_t eval_interval = 10000;  // env steps between evaluations
  std::size_t test_episodes = 32;
  std::string config_hash;
  std::string log_path;  // rewritten after every row when set
};

struct TrainHooks {
  TargetCopyHook on_target_copy;
};

// Mean return and success rate of a set of episodes.
struct EvalResult {
  double return_mean = 0.0;
  double win_rate = 0.0;
};
EvalResult summarize(const std::vector<rollout::Episode>& episodes);

// Collect W episodes, store them, update once, copy targets on schedule,
// and evaluate every eval_interval env steps (and once at the end).
class Trainer {
 public:
  explicit Trainer(RunConfig cfg, TrainHooks hooks = {});

  // Runs until total_env_steps. On error the rows logged so far are saved
  // to log_path before the error propagates.
  MetricLog run();

  Learner& learner() noexcept { return *learner_; }
  const envs::Env& env() const noexcept { return *env_; }
  std::uint64_t env_steps() const noexcept { return env_steps_; }
  std::uint64_t episodes() const noexcept { return episodes_; }
  EvalResult evaluate();

 private:
  void log_row(MetricLog& log, double loss, double epsilon);

  RunConfig cfg_;
  TrainHooks hooks_;
  std::unique_ptr<envs::Env> env_;
  Rng rng_;
  std::unique_ptr<Learner> learner_;
  rollout::RolloutWorkers workers_;
  Buffers buffers_;
  TargetSchedule targets_;
  std::uint64_t env_steps_ = 0;
  std::uint64_t episodes_ = 0;
  std::uint64_t start_ms_ = 0;
};

MetricLog train(const RunConfig& cfg, const TrainHooks& hooks = {});

// Return of uniformly random joint actions over `episodes` episodes.
EvalResult random_baseline(const envs::EnvConfig& env, std::size_t episodes, std::uint64_t seed);

}  // namespace marl::trainers
