#include "marl/cli/summary.h"

#include <algorithm>
#include <cmath>

#include "marl/common/error.h"

namespace marl::cli {

double median(std::vector<double> values) {
  if (values.empty()) throw Error("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Spread spread(const std::vector<double>& values) {
  Spread s;
  s.median = median(values);
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

bool Summary::all_ok() const {
  return std::all_of(seeds.begin(), seeds.end(), [](const SeedOutcome& s) { return s.ok; });
}

namespace {

Json spread_json(const Spread& s) {
  return {{"median", s.median}, {"min", s.min}, {"max", s.max}};
}

}  // namespace

Json Summary::to_json() const {
  Json seeds_json = Json::array();
  for (const auto& s : seeds) {
    Json e = {{"seed", s.seed}, {"status", s.ok ? "ok" : "failed"}, {"csv", s.csv}};
    if (!s.ok) e["error"] = s.error;
    seeds_json.push_back(std::move(e));
  }
  Json points_json = Json::array();
  for (const auto& p : points) {
    points_json.push_back({{"index", p.index},
                           {"env_steps", spread_json(p.env_steps)},
                           {"test_return", spread_json(p.test_return)},
                           {"test_win_rate", spread_json(p.test_win_rate)}});
  }
  return {{"config_hash", config_hash}, {"seeds", seeds_json}, {"points", points_json}};
}

Summary summarize(const std::string& config_hash, std::vector<SeedOutcome> seeds) {
  Summary out;
  out.config_hash = config_hash;
  std::size_t rows = 0;
  bool any = false;
  for (const auto& s : seeds) {
    if (!s.ok) continue;
    if (s.log.config_hash != config_hash) {
      throw Error("seed " + std::to_string(s.seed) + " was produced by config " +
                  s.log.config_hash + ", expected " + config_hash);
    }
    rows = any ? std::min(rows, s.log.rows.size()) : s.log.rows.size();
    any = true;
  }
  for (std::size_t k = 0; any && k < rows; ++k) {
    std::vector<double> steps, ret, win;
    for (const auto& s : seeds) {
      if (!s.ok) continue;
      const auto& row = s.log.rows[k];
      steps.push_back(static_cast<double>(row.env_steps));
      ret.push_back(row.test_return_mean);
      win.push_back(row.test_win_rate);
    }
    out.points.push_back({k, spread(steps), spread(ret), spread(win)});
  }
  out.seeds = std::move(seeds);
  return out;
}

}  // namespace marl::cli
