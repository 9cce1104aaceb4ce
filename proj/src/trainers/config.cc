#include "marl/trainers/config.h"

#include <array>
#include <cmath>
#include <utility>

#include "marl/common/error.h"

namespace marl::trainers {

namespace {

constexpr std::array<std::pair<Algo, const char*>, 8> kAlgoNames{{
    {Algo::kVdn, "vdn"},
    {Algo::kQmix, "qmix"},
    {Algo::kQatten, "qatten"},
    {Algo::kQplex, "qplex"},
    {Algo::kOwQmix, "owqmix"},
    {Algo::kRiit, "riit"},
    {Algo::kLica, "lica"},
    {Algo::kVmix, "vmix"},
}};

}  // namespace

std::string to_string(Algo algo) {
  for (const auto& [a, name] : kAlgoNames) {
    if (a == algo) return name;
  }
  return "unknown";
}

Algo algo_from_string(const std::string& name) {
  for (const auto& [a, n] : kAlgoNames) {
    if (name == n) return a;
  }
  std::string known;
  for (const auto& [a, n] : kAlgoNames) known += std::string(known.empty() ? "" : ", ") + n;
  throw ConfigError({"trainer.algo: unknown algorithm \"" + name + "\" (known: " + known + ")"});
}

bool is_value_based(Algo algo) {
  return algo != Algo::kRiit && algo != Algo::kLica && algo != Algo::kVmix;
}

std::string to_string(nets::OptimizerKind kind) {
  return kind == nets::OptimizerKind::kAdam ? "adam" : "rmsprop";
}

nets::OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "adam") return nets::OptimizerKind::kAdam;
  if (name == "rmsprop") return nets::OptimizerKind::kRmsProp;
  throw ConfigError({"trainer.optimizer: unknown optimizer \"" + name +
                     "\" (known: adam, rmsprop)"});
}

TrainerConfig TrainerConfig::defaults(Algo algo) {
  TrainerConfig c;
  c.algo = algo;
  c.epsilon = {1.0, 0.05, 100000};
  switch (algo) {
    case Algo::kRiit:
      c.batch_size = 64;
      c.online_batch_size = 32;
      c.entropy_coef = 0.03;
      break;
    case Algo::kLica:
      c.batch_size = 32;
      c.online_batch_size = 32;
      c.lr = 0.0025;
      c.critic_lr = 0.0005;
      c.entropy_coef = 0.06;
      break;
    case Algo::kVmix:
      c.lambda = 0.8;
      c.optimizer = nets::OptimizerKind::kRmsProp;
      c.entropy_coef = 0.01;
      c.epsilon = {0.5, 0.01, 100000};
      break;
    default:
      break;
  }
  return c;
}

std::vector<std::string> TrainerConfig::validate(const std::string& prefix) const {
  std::vector<std::string> issues;
  auto key = [&](const char* name) { return prefix + "." + name; };
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(gamma >= 0.0 && gamma < 1.0)) issues.push_back(key("gamma") + " must lie in [0, 1)");
  if (!(lambda >= 0.0 && lambda <= 1.0)) issues.push_back(key("lambda") + " must lie in [0, 1]");
  if (batch_size == 0) issues.push_back(key("batch_size") + " must be positive");
  if (online_batch_size == 0) issues.push_back(key("online_batch_size") + " must be positive");
  if (buffer_capacity < batch_size) {
    issues.push_back(key("buffer_capacity") + " must be at least " + key("batch_size"));
  }
  if (target_update_interval == 0) {
    issues.push_back(key("target_update_interval") + " must be positive");
  }
  if (!(lr > 0.0 && finite(lr))) issues.push_back(key("lr") + " must be positive");
  if (!(critic_lr > 0.0 && finite(critic_lr))) {
    issues.push_back(key("critic_lr") + " must be positive");
  }
  if (!(clip_norm >= 0.0)) issues.push_back(key("clip_norm") + " must be >= 0 (0 disables)");
  if (!(entropy_coef >= 0.0 && finite(entropy_coef))) {
    issues.push_back(key("entropy_coef") + " must be >= 0");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) issues.push_back(key("alpha") + " must lie in (0, 1]");
  if (workers == 0 || workers > 256) issues.push_back(key("workers") + " must lie in [1, 256]");
  if (hidden == 0) issues.push_back(key("hidden") + " must be positive");
  if (mixer_embed == 0) issues.push_back(key("mixer_embed") + " must be positive");
  if (attention_heads == 0) issues.push_back(key("attention_heads") + " must be positive");
  if (offline_updates == 0) issues.push_back(key("offline_updates") + " must be positive");
  for (auto& issue : epsilon.validate(key("epsilon"))) issues.push_back(std::move(issue));
  return issues;
}

}  // namespace marl::trainers
