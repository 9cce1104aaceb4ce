#include "marl/cli/runner.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "marl/common/error.h"

namespace marl::cli {

namespace fs = std::filesystem;

namespace {

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string seed_file(std::uint64_t seed) { return "seed_" + std::to_string(seed) + ".csv"; }

}  // namespace

Summary run_experiment(const ExperimentConfig& cfg, std::ostream* progress) {
  if (auto issues = cfg.validate(); !issues.empty()) throw ConfigError(std::move(issues));
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  const std::string hash = config_hash(cfg);
  write_json(dir / "config.json", {{"config_hash", hash}, {"config", to_json(cfg)}});

  std::vector<SeedOutcome> outcomes;
  for (std::size_t k = 0; k < cfg.n_seeds; ++k) {
    trainers::RunConfig rc = cfg.run_config(k);
    rc.log_path = (dir / seed_file(rc.seed)).string();
    SeedOutcome o;
    o.seed = rc.seed;
    o.csv = seed_file(rc.seed);
    try {
      o.log = trainers::train(rc);
      o.ok = true;
    } catch (const std::exception& e) {
      o.error = e.what();
      if (fs::is_regular_file(rc.log_path)) {
        try {
          o.log = trainers::MetricLog::load(rc.log_path);
        } catch (const std::exception&) {
          o.log = {};
        }
      }
    }
    if (progress) {
      *progress << "seed " << o.seed << ": ";
      if (!o.ok) {
        *progress << "failed: " << o.error << '\n';
      } else if (!o.log.rows.empty()) {
        const auto& last = o.log.rows.back();
        *progress << "env_steps " << last.env_steps << " test_return " << last.test_return_mean
                  << " win_rate " << last.test_win_rate << '\n';
      } else {
        *progress << "no eval rows\n";
      }
    }
    outcomes.push_back(std::move(o));
  }
  Summary summary = summarize(hash, std::move(outcomes));
  write_json(dir / "summary.json", summary.to_json());
  return summary;
}

Summary recompute_summary(const std::string& dir_name) {
  const fs::path dir(dir_name);
  if (!fs::is_directory(dir)) throw Error(dir_name + ": not a directory");

  std::map<std::uint64_t, std::string> failures;
  if (fs::exists(dir / "summary.json")) {
    const Json old = read_json_file((dir / "summary.json").string());
    for (const auto& s : old.value("seeds", Json::array())) {
      if (s.value("status", "ok") == "failed") {
        failures[s.at("seed").get<std::uint64_t>()] = s.value("error", "");
      }
    }
  }

  std::vector<SeedOutcome> outcomes;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("seed_", 0) != 0 || entry.path().extension() != ".csv") continue;
    SeedOutcome o;
    o.seed = std::stoull(name.substr(5));
    o.csv = name;
    o.log = trainers::MetricLog::load(entry.path().string());
    const auto f = failures.find(o.seed);
    o.ok = f == failures.end();
    if (!o.ok) o.error = f->second;
    outcomes.push_back(std::move(o));
  }
  for (const auto& [seed, error] : failures) {
    const bool seen = std::any_of(outcomes.begin(), outcomes.end(),
                                  [&](const SeedOutcome& o) { return o.seed == seed; });
    if (!seen) outcomes.push_back({seed, false, error, seed_file(seed), {}});
  }
  if (outcomes.empty()) throw Error(dir_name + ": no seed_*.csv files");
  std::sort(outcomes.begin(), outcomes.end(),
            [](const SeedOutcome& a, const SeedOutcome& b) { return a.seed < b.seed; });

  std::string hash;
  if (fs::exists(dir / "config.json")) {
    hash = read_json_file((dir / "config.json").string()).at("config_hash").get<std::string>();
  } else {
    hash = outcomes.front().log.config_hash;
  }
  Summary summary = summarize(hash, std::move(outcomes));
  write_json(dir / "summary.json", summary.to_json());
  return summary;
}

}  // namespace marl::cli
