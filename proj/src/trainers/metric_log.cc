#include "marl/trainers/metric_log.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "marl/common/error.h"

namespace marl::trainers {

namespace {

constexpr const char* kHeader =
    "env_steps,episodes,loss,test_return_mean,test_win_rate,epsilon,wall_ms";
constexpr const char* kHashPrefix = "# config_hash: ";

std::string format(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw Error("metric log: bad number \"" + s + "\"");
  return v;
}

}  // namespace

void MetricLog::write_csv(std::ostream& out) const {
  out << kHashPrefix << config_hash << '\n' << kHeader << '\n';
  for (const MetricRow& r : rows) {
    out << r.env_steps << ',' << r.episodes << ',' << format(r.loss) << ','
        << format(r.test_return_mean) << ',' << format(r.test_win_rate) << ','
        << format(r.epsilon) << ',' << r.wall_ms << '\n';
  }
}

std::string MetricLog::to_csv() const {
  std::ostringstream out;
  write_csv(out);
  return out.str();
}

MetricLog MetricLog::read_csv(std::istream& in) {
  MetricLog log;
  std::string line;
  if (!std::getline(in, line) || line.rfind(kHashPrefix, 0) != 0) {
    throw Error("metric log: missing config hash line");
  }
  log.config_hash = line.substr(std::string(kHashPrefix).size());
  if (!std::getline(in, line) || line != kHeader) throw Error("metric log: bad header");
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) {
      throw Error("metric log line " + std::to_string(lineno) + ": expected 7 columns");
    }
    try {
      MetricRow r;
      r.env_steps = std::stoull(cells[0]);
      r.episodes = std::stoull(cells[1]);
      r.loss = parse_double(cells[2]);
      r.test_return_mean = parse_double(cells[3]);
      r.test_win_rate = parse_double(cells[4]);
      r.epsilon = parse_double(cells[5]);
      r.wall_ms = std::stoull(cells[6]);
      log.rows.push_back(r);
    } catch (const std::logic_error&) {
      throw Error("metric log line " + std::to_string(lineno) + ": bad value");
    }
  }
  return log;
}

void MetricLog::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_csv(out);
  if (!out) throw Error("write failed: " + path);
}

MetricLog MetricLog::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  return read_csv(in);
}

}  // namespace marl::trainers
