#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "marl/cli/experiment_config.h"
#include "marl/trainers/metric_log.h"

namespace marl::cli {

// Sample median; mean of the two middle values for an even count.
double median(std::vector<double> values);

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::string csv;  // file name relative to the run directory
  trainers::MetricLog log;
};

struct Spread {
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
};
Spread spread(const std::vector<double>& values);

// Eval point k aggregates row k of every successful seed.
struct SummaryPoint {
  std::size_t index = 0;
  Spread env_steps;
  Spread test_return;
  Spread test_win_rate;
};

struct Summary {
  std::string config_hash;
  std::vector<SeedOutcome> seeds;
  std::vector<SummaryPoint> points;

  bool all_ok() const;
  Json to_json() const;
};

// Points cover the eval indices present in every successful seed. Throws
// Error when the logs carry different config hashes.
Summary summarize(const std::string& config_hash, std::vector<SeedOutcome> seeds);

}  // namespace marl::cli
