#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "marl/cli/experiment_config.h"
#include "marl/cli/summary.h"

namespace marl::cli {

// Output layout under cfg.output_dir:
//   config.json        full config plus its hash
//   seed_<seed>.csv    one MetricLog per seed
//   summary.json       across-seed aggregate
// A failing seed is recorded and the remaining seeds still run.
Summary run_experiment(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

// Rebuilds summary.json from the CSVs in `dir`, keeping seed failures
// recorded in an existing summary.json.
Summary recompute_summary(const std::string& dir);

}  // namespace marl::cli
