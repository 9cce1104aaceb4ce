#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "marl/cli/experiment_config.h"
#include "marl/cli/presets.h"
#include "marl/cli/runner.h"
#include "marl/common/error.h"
#include "marl/envs/trace.h"

namespace {

using namespace marl;

struct Source {
  std::string config_path;
  std::string preset;
  std::vector<std::string> extras;
};

void add_source(CLI::App* cmd, Source& src) {
  cmd->add_option("--config", src.config_path, "JSON config file");
  cmd->add_option("--preset", src.preset, "named preset or trick study (see `list`)");
  cmd->allow_extras();
}

std::vector<std::string> key_flags(const std::vector<std::string>& extras) {
  std::vector<std::string> flags;
  for (const auto& e : extras) {
    if (e.rfind("--", 0) != 0 || e.find('=') == std::string::npos) {
      throw ConfigError({"unexpected argument \"" + e + "\" (overrides are --key.path=value)"});
    }
    flags.push_back(e.substr(2));
  }
  return flags;
}

struct Arm {
  std::string name;
  cli::ExperimentConfig config;
};

std::vector<Arm> resolve_arms(const Source& src) {
  const std::vector<std::string> flags = key_flags(src.extras);
  if (src.preset.empty()) return {{"", cli::parse_config(nullptr, src.config_path, flags)}};
  const auto presets = cli::resolve(src.preset);
  std::vector<Arm> arms;
  for (const cli::Preset* p : presets) {
    cli::Json base = cli::to_json(p->config);
    if (presets.size() > 1) base["output_dir"] = "runs/" + src.preset;
    cli::ExperimentConfig cfg = cli::parse_config(base, src.config_path, flags);
    if (presets.size() > 1) cfg.output_dir += "/" + p->name;
    arms.push_back({p->name, std::move(cfg)});
  }
  return arms;
}

void print_summary(const cli::Summary& s) {
  std::printf("config_hash %s\n", s.config_hash.c_str());
  for (const auto& seed : s.seeds) {
    std::printf("  seed %llu %s%s%s\n", static_cast<unsigned long long>(seed.seed),
                seed.ok ? "ok" : "FAILED", seed.ok ? "" : ": ", seed.error.c_str());
  }
  std::printf("  %10s %12s %12s %12s %10s\n", "env_steps", "ret_median", "ret_min", "ret_max",
              "win_median");
  for (const auto& p : s.points) {
    std::printf("  %10.0f %12.4f %12.4f %12.4f %10.4f\n", p.env_steps.median,
                p.test_return.median, p.test_return.min, p.test_return.max,
                p.test_win_rate.median);
  }
}

int cmd_run(const Source& src) {
  bool ok = true;
  for (const Arm& arm : resolve_arms(src)) {
    if (!arm.name.empty()) std::printf("== %s -> %s\n", arm.name.c_str(), arm.config.output_dir.c_str());
    const cli::Summary s = cli::run_experiment(arm.config, &std::cout);
    print_summary(s);
    ok = ok && s.all_ok();
  }
  return ok ? 0 : 1;
}

int cmd_show(const Source& src) {
  for (const Arm& arm : resolve_arms(src)) {
    cli::Json j = cli::to_json(arm.config);
    std::cout << cli::Json{{"preset", arm.name}, {"config_hash", cli::config_hash(arm.config)},
                           {"config", j}}
                     .dump(2)
              << '\n';
  }
  return 0;
}

int cmd_list() {
  for (const auto& p : cli::presets()) {
    std::printf("%-32s %s\n", p.name.c_str(), p.description.c_str());
  }
  std::printf("\nstudies (run every arm):\n");
  for (const auto& s : cli::studies()) {
    std::printf("%-32s varies %s:", s.name.c_str(), s.key.c_str());
    for (const auto& a : s.arms) std::printf(" %s", a.c_str());
    std::printf("\n");
  }
  return 0;
}

int cmd_trace(const Source& src, std::size_t episodes, std::uint64_t seed, const std::string& out) {
  const auto arms = resolve_arms(src);
  auto env = envs::make_env(arms.front().config.env);
  std::ofstream file;
  std::ostream* sink = &std::cout;
  if (!out.empty()) {
    file.open(out, std::ios::binary);
    if (!file) throw Error("cannot write " + out);
    sink = &file;
  }
  Rng rng(seed);
  const envs::ActionFn random = [](const envs::Env& e, Rng& r) {
    std::vector<int> a(e.n_agents());
    for (int& x : a) x = static_cast<int>(uniform_index(r, e.n_actions()));
    return a;
  };
  for (std::size_t k = 0; k < episodes; ++k) envs::trace_episode(*env, rng, random, sink);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative multi-agent RL lab"};
  app.require_subcommand(1);

  Source run_src;
  auto* run = app.add_subcommand("run", "train every seed of a config and summarise");
  add_source(run, run_src);

  std::string eval_dir;
  auto* eval = app.add_subcommand("eval", "recompute summary.json from per-seed CSVs");
  eval->add_option("--dir", eval_dir, "run directory")->required();

  auto* list = app.add_subcommand("list", "list presets and trick studies");

  Source show_src;
  auto* show = app.add_subcommand("show", "print the fully resolved config");
  add_source(show, show_src);

  Source trace_src;
  std::size_t trace_episodes = 1;
  std::uint64_t trace_seed = 1;
  std::string trace_out;
  auto* trace = app.add_subcommand("trace", "write random-play episode traces as JSON lines");
  add_source(trace, trace_src);
  trace->add_option("--episodes", trace_episodes, "episodes to trace");
  trace->add_option("--seed", trace_seed, "RNG seed");
  trace->add_option("--out", trace_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      run_src.extras = run->remaining();
      return cmd_run(run_src);
    }
    if (*eval) {
      const cli::Summary s = cli::recompute_summary(eval_dir);
      print_summary(s);
      return s.all_ok() ? 0 : 1;
    }
    if (*list) return cmd_list();
    if (*show) {
      show_src.extras = show->remaining();
      return cmd_show(show_src);
    }
    if (*trace) {
      trace_src.extras = trace->remaining();
      return cmd_trace(trace_src, trace_episodes, trace_seed, trace_out);
    }
  } catch (const marl::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
