#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace marl::trainers {

struct MetricRow {
  std::uint64_t env_steps = 0;
  std::uint64_t episodes = 0;
  double loss = 0.0;  // mean update loss since the previous row; NaN if none
  double test_return_mean = 0.0;
  double test_win_rate = 0.0;
  double epsilon = 0.0;
  std::uint64_t wall_ms = 0;

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

// CSV layout:
//   # config_hash: <hex>
//   env_steps,episodes,loss,test_return_mean,test_win_rate,epsilon,wall_ms
//   ...
struct MetricLog {
  std::string config_hash;
  std::vector<MetricRow> rows;

  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
  static MetricLog read_csv(std::istream& in);
  void save(const std::string& path) const;
  static MetricLog load(const std::string& path);
};

}  // namespace marl::trainers
