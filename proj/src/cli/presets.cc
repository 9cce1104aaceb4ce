#include "marl/cli/presets.h"

#include "marl/common/error.h"

namespace marl::cli {

namespace {

using trainers::Algo;
using trainers::TrainerConfig;

ExperimentConfig matrix_game(const envs::Payoff& payoff, Algo algo, bool constrain) {
  ExperimentConfig c;
  c.env.kind = envs::EnvKind::kMatrix;
  c.env.matrix.payoff = payoff;
  c.trainer = TrainerConfig::defaults(algo);
  c.trainer.constrain_monotonic = constrain;
  // Uniform exploration over all nine joint actions for the whole run.
  c.trainer.epsilon = {1.0, 1.0, 0};
  c.trainer.total_env_steps = 20000;
  c.eval_interval = 2000;
  c.test_episodes = 4;
  c.n_seeds = 5;
  return c;
}

ExperimentConfig predator_prey(Algo algo, bool constrain) {
  ExperimentConfig c;
  c.env.kind = envs::EnvKind::kPredatorPrey;
  c.trainer = TrainerConfig::defaults(algo);
  c.trainer.constrain_monotonic = constrain;
  c.trainer.buffer_capacity = 1000;
  c.trainer.workers = 8;
  c.trainer.total_env_steps = 2'000'000;
  c.eval_interval = 20000;
  c.test_episodes = 32;
  c.n_seeds = 5;
  return c;
}

// Trick studies vary one knob of QMIX on predator-prey.
ExperimentConfig trick_base() { return predator_prey(Algo::kQmix, true); }

std::vector<Preset> build() {
  std::vector<Preset> out;
  auto add = [&](std::string name, std::string description, ExperimentConfig c) {
    c.output_dir = "runs/" + name;
    out.push_back({std::move(name), std::move(description), std::move(c)});
  };
  const envs::Payoff t1 = envs::table1_payoff();
  const envs::Payoff t7 = envs::table7_payoff();
  add("table1-qmix", "QMIX on the non-monotonic matrix game", matrix_game(t1, Algo::kQmix, true));
  add("table1-vdn", "VDN on the non-monotonic matrix game", matrix_game(t1, Algo::kVdn, true));
  add("table1-riit", "RIIT on the non-monotonic matrix game", matrix_game(t1, Algo::kRiit, true));
  add("table1-riit-nomono", "RIIT without the monotonicity constraint, matrix game",
      matrix_game(t1, Algo::kRiit, false));
  add("table7-qmix", "QMIX on the matrix game with -12 replaced by -0.5",
      matrix_game(t7, Algo::kQmix, true));

  add("pp-qmix", "QMIX on predator-prey", predator_prey(Algo::kQmix, true));
  add("pp-riit", "RIIT on predator-prey", predator_prey(Algo::kRiit, true));
  add("pp-riit-nomono", "RIIT without the monotonicity constraint on predator-prey",
      predator_prey(Algo::kRiit, false));
  add("pp-vmix", "VMIX on predator-prey", predator_prey(Algo::kVmix, true));
  add("pp-vmix-nomono", "VMIX without the monotonicity constraint on predator-prey",
      predator_prey(Algo::kVmix, false));

  for (auto [name, kind] : {std::pair{"adam", nets::OptimizerKind::kAdam},
                            std::pair{"rmsprop", nets::OptimizerKind::kRmsProp}}) {
    ExperimentConfig c = trick_base();
    c.trainer.optimizer = kind;
    add(std::string("trick-adam-vs-rmsprop-") + name, std::string("QMIX on predator-prey, ") + name,
        c);
  }
  for (auto [name, lambda] : {std::pair{"0", 0.0}, std::pair{"0.3", 0.3}, std::pair{"0.6", 0.6},
                              std::pair{"0.9", 0.9}}) {
    ExperimentConfig c = trick_base();
    c.trainer.lambda = lambda;
    add(std::string("trick-qlambda-") + name,
        std::string("QMIX on predator-prey, Q(lambda) with lambda ") + name, c);
  }
  for (std::size_t size : {5000u, 20000u}) {
    ExperimentConfig c = trick_base();
    c.trainer.buffer_capacity = size;
    add("trick-buffer-" + std::to_string(size),
        "QMIX on predator-prey, replay buffer of " + std::to_string(size) + " episodes", c);
  }
  for (std::size_t w : {1u, 4u, 8u}) {
    ExperimentConfig c = trick_base();
    c.trainer.workers = w;
    add("trick-workers-" + std::to_string(w),
        "QMIX on predator-prey, " + std::to_string(w) + (w == 1 ? " rollout worker" : " rollout workers"), c);
  }
  for (std::size_t h : {64u, 256u}) {
    ExperimentConfig c = trick_base();
    c.trainer.hidden = h;
    add("trick-hidden-" + std::to_string(h),
        "QMIX on predator-prey, agent hidden width " + std::to_string(h), c);
  }
  for (auto [name, steps] : {std::pair{"100k", 100000u}, std::pair{"500k", 500000u}}) {
    ExperimentConfig c = trick_base();
    c.trainer.epsilon.anneal_steps = steps;
    add(std::string("trick-anneal-") + name,
        std::string("QMIX on predator-prey, epsilon annealed over ") + name + " steps", c);
  }
  return out;
}

void collect_diffs(const Json& a, const Json& b, const std::string& prefix,
                   std::vector<std::string>& out) {
  if (a.is_object() && b.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
      if (!b.contains(it.key())) {
        out.push_back(path);
      } else {
        collect_diffs(it.value(), b[it.key()], path, out);
      }
    }
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (!a.contains(it.key())) out.push_back(prefix.empty() ? it.key() : prefix + "." + it.key());
    }
    return;
  }
  if (a != b) out.push_back(prefix);
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.push_back(p.name);
  return names;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  throw ConfigError({"unknown preset \"" + name + "\" (known: " + known + ")"});
}

const std::vector<Study>& studies() {
  static const std::vector<Study> all = {
      {"trick-adam-vs-rmsprop", "trainer.optimizer",
       {"trick-adam-vs-rmsprop-adam", "trick-adam-vs-rmsprop-rmsprop"}},
      {"trick-qlambda", "trainer.lambda",
       {"trick-qlambda-0", "trick-qlambda-0.3", "trick-qlambda-0.6", "trick-qlambda-0.9"}},
      {"trick-buffer", "trainer.buffer_capacity", {"trick-buffer-5000", "trick-buffer-20000"}},
      {"trick-workers", "trainer.workers",
       {"trick-workers-1", "trick-workers-4", "trick-workers-8"}},
      {"trick-hidden", "trainer.hidden", {"trick-hidden-64", "trick-hidden-256"}},
      {"trick-anneal", "trainer.epsilon.anneal_steps", {"trick-anneal-100k", "trick-anneal-500k"}},
  };
  return all;
}

std::vector<const Preset*> resolve(const std::string& name) {
  for (const auto& s : studies()) {
    if (s.name != name) continue;
    std::vector<const Preset*> arms;
    for (const auto& arm : s.arms) arms.push_back(&find_preset(arm));
    return arms;
  }
  return {&find_preset(name)};
}

std::vector<std::string> diff_keys(const ExperimentConfig& a, const ExperimentConfig& b) {
  Json ja = to_json(a);
  Json jb = to_json(b);
  ja.erase("output_dir");
  jb.erase("output_dir");
  std::vector<std::string> out;
  collect_diffs(ja, jb, "", out);
  return out;
}

}  // namespace marl::cli
