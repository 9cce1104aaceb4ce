#include "marl/envs/matrix_game.h"

#include <algorithm>
#include <cmath>

#include "marl/common/error.h"

namespace marl::envs {

Payoff table1_payoff() { return {{12, -12, -12}, {-12, 0, 0}, {-12, 0, 0}}; }
Payoff table7_payoff() { return {{12, -0.5, -0.5}, {-0.5, 0, 0}, {-0.5, 0, 0}}; }

std::vector<std::string> MatrixGameSpec::validate() const {
  std::vector<std::string> issues;
  if (payoff.empty()) issues.push_back("env.matrix.payoff must not be empty");
  for (const auto& row : payoff) {
    if (row.size() != payoff.size()) {
      issues.push_back("env.matrix.payoff must be square");
      break;
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        issues.push_back("env.matrix.payoff entries must be finite");
        return issues;
      }
    }
  }
  return issues;
}

MatrixGame::MatrixGame(MatrixGameSpec spec) : spec_(std::move(spec)) {
  if (auto issues = spec_.validate(); !issues.empty()) throw ConfigError(std::move(issues));
  best_ = spec_.payoff[0][0];
  for (const auto& row : spec_.payoff) best_ = std::max(best_, *std::max_element(row.begin(), row.end()));
}

void MatrixGame::reset(Rng&) { done_ = false; }

StepResult MatrixGame::step(std::span<const int> actions) {
  if (done_) throw Error("matrix game: step after the episode ended");
  if (actions.size() != 2) throw Error("matrix game: expected 2 actions");
  for (int a : actions) {
    if (a < 0 || static_cast<std::size_t>(a) >= n_actions()) {
      throw Error("matrix game: action " + std::to_string(a) + " out of range");
    }
  }
  done_ = true;
  StepResult r;
  r.reward = spec_.payoff[actions[0]][actions[1]];
  r.terminated = true;
  r.won = r.reward == best_;
  return r;
}

std::vector<double> MatrixGame::observe(std::size_t agent) const {
  std::vector<double> obs(2, 0.0);
  obs.at(agent) = 1.0;
  return obs;
}

}  // namespace marl::envs
