#include "marl/envs/predator_prey.h"

#include <cmath>
#include <numeric>

#include "marl/common/error.h"

namespace marl::envs {
namespace {

bool adjacent(PredatorPrey::Cell a, PredatorPrey::Cell b) {
  return std::abs(a.row - b.row) + std::abs(a.col - b.col) == 1;
}

double normalized(int v, int extent) {
  return extent > 1 ? static_cast<double>(v) / static_cast<double>(extent - 1) : 0.0;
}

}  // namespace

std::vector<std::string> PredatorPreySpec::validate() const {
  std::vector<std::string> issues;
  if (width < 1) issues.push_back("env.predator_prey.width must be >= 1");
  if (height < 1) issues.push_back("env.predator_prey.height must be >= 1");
  if (n_predators < 1) issues.push_back("env.predator_prey.n_predators must be >= 1");
  if (n_prey < 1) issues.push_back("env.predator_prey.n_prey must be >= 1");
  if (episode_limit < 1) issues.push_back("env.predator_prey.episode_limit must be >= 1");
  if (obs_radius < 0) issues.push_back("env.predator_prey.obs_radius must be >= 0");
  if (!std::isfinite(capture_reward)) issues.push_back("env.predator_prey.capture_reward must be finite");
  if (!std::isfinite(lone_catch_penalty)) {
    issues.push_back("env.predator_prey.lone_catch_penalty must be finite");
  }
  if (width >= 1 && height >= 1 && n_predators >= 0 && n_prey >= 0 &&
      static_cast<long>(n_predators) + n_prey > static_cast<long>(width) * height) {
    issues.push_back("grid " + std::to_string(width) + "x" + std::to_string(height) +
                     " is too small for " + std::to_string(n_predators + n_prey) + " entities");
  }
  return issues;
}

PredatorPrey::PredatorPrey(PredatorPreySpec spec) : spec_(spec) {
  if (auto issues = spec_.validate(); !issues.empty()) throw ConfigError(std::move(issues));
}

std::size_t PredatorPrey::obs_dim() const {
  const std::size_t side = 2 * spec_.obs_radius + 1;
  return 2 * side * side + 2;
}

std::size_t PredatorPrey::state_dim() const { return 2 * spec_.n_predators + 3 * spec_.n_prey; }

void PredatorPrey::reset(Rng& rng) {
  const int cells = spec_.width * spec_.height;
  std::vector<int> order(cells);
  std::iota(order.begin(), order.end(), 0);
  const int total = spec_.n_predators + spec_.n_prey;
  for (int k = 0; k < total; ++k) {
    const std::size_t j = k + uniform_index(rng, cells - k);
    std::swap(order[k], order[j]);
  }
  predators_.clear();
  prey_.clear();
  for (int k = 0; k < total; ++k) {
    const Cell c{order[k] / spec_.width, order[k] % spec_.width};
    (k < spec_.n_predators ? predators_ : prey_).push_back(c);
  }
  alive_.assign(spec_.n_prey, true);
  prey_rng_.seed(rng());
  t_ = 0;
  done_ = false;
}

void PredatorPrey::set_layout(std::vector<Cell> predators, std::vector<Cell> prey, Rng& rng) {
  if (predators.size() != static_cast<std::size_t>(spec_.n_predators) ||
      prey.size() != static_cast<std::size_t>(spec_.n_prey)) {
    throw Error("set_layout: entity counts differ from the configuration");
  }
  predators_ = std::move(predators);
  prey_ = std::move(prey);
  for (std::size_t i = 0; i < predators_.size() + prey_.size(); ++i) {
    const Cell a = i < predators_.size() ? predators_[i] : prey_[i - predators_.size()];
    if (!inside(a)) throw Error("set_layout: entity outside the grid");
    for (std::size_t j = 0; j < i; ++j) {
      const Cell b = j < predators_.size() ? predators_[j] : prey_[j - predators_.size()];
      if (a == b) throw Error("set_layout: two entities share a cell");
    }
  }
  alive_.assign(spec_.n_prey, true);
  prey_rng_.seed(rng());
  t_ = 0;
  done_ = false;
}

bool PredatorPrey::inside(Cell c) const {
  return c.row >= 0 && c.row < spec_.height && c.col >= 0 && c.col < spec_.width;
}

bool PredatorPrey::occupied(Cell c) const {
  for (const Cell& p : predators_) {
    if (p == c) return true;
  }
  for (std::size_t j = 0; j < prey_.size(); ++j) {
    if (alive_[j] && prey_[j] == c) return true;
  }
  return false;
}

PredatorPrey::Cell PredatorPrey::moved(Cell c, int action) {
  switch (action) {
    case kUp: return {c.row - 1, c.col};
    case kDown: return {c.row + 1, c.col};
    case kLeft: return {c.row, c.col - 1};
    case kRight: return {c.row, c.col + 1};
    default: return c;
  }
}

StepResult PredatorPrey::step(std::span<const int> actions) {
  if (done_) throw Error("predator-prey: step after the episode ended");
  if (actions.size() != predators_.size()) {
    throw Error("predator-prey: expected " + std::to_string(predators_.size()) + " actions, got " +
                std::to_string(actions.size()));
  }
  for (int a : actions) {
    if (a < 0 || a >= static_cast<int>(n_actions())) {
      throw Error("predator-prey: action " + std::to_string(a) + " out of range");
    }
  }

  for (std::size_t i = 0; i < predators_.size(); ++i) {
    const Cell target = moved(predators_[i], actions[i]);
    if (target == predators_[i] || !inside(target) || occupied(target)) continue;
    predators_[i] = target;
  }

  StepResult result;
  std::vector<bool> captured(prey_.size(), false);
  for (std::size_t j = 0; j < prey_.size(); ++j) {
    if (!alive_[j]) continue;
    int catchers = 0;
    for (std::size_t i = 0; i < predators_.size(); ++i) {
      if (actions[i] == kCatch && adjacent(predators_[i], prey_[j])) ++catchers;
    }
    if (catchers >= 2) {
      captured[j] = true;
      result.reward += spec_.capture_reward;
    }
  }
  for (std::size_t i = 0; i < predators_.size(); ++i) {
    if (actions[i] != kCatch) continue;
    bool near_prey = false;
    bool shared = false;
    for (std::size_t j = 0; j < prey_.size(); ++j) {
      if (!alive_[j] || !adjacent(predators_[i], prey_[j])) continue;
      near_prey = true;
      shared = shared || captured[j];
    }
    if (near_prey && !shared) result.reward += spec_.lone_catch_penalty;
  }
  bool any_alive = false;
  for (std::size_t j = 0; j < prey_.size(); ++j) {
    if (captured[j]) alive_[j] = false;
    any_alive = any_alive || alive_[j];
  }

  for (std::size_t j = 0; j < prey_.size(); ++j) {
    if (!alive_[j]) continue;
    Cell options[5];
    int count = 0;
    options[count++] = prey_[j];
    for (int a = kUp; a <= kRight; ++a) {
      const Cell target = moved(prey_[j], a);
      if (inside(target) && !occupied(target)) options[count++] = target;
    }
    prey_[j] = options[uniform_index(prey_rng_, count)];
  }

  ++t_;
  result.terminated = !any_alive;
  result.truncated = !result.terminated && t_ >= spec_.episode_limit;
  result.won = result.terminated;
  done_ = result.done();
  return result;
}

std::vector<double> PredatorPrey::observe(std::size_t agent) const {
  const Cell self = predators_.at(agent);
  const int r = spec_.obs_radius;
  const int side = 2 * r + 1;
  std::vector<double> obs(obs_dim(), 0.0);
  auto mark = [&](int channel, Cell c) {
    const int dr = c.row - self.row;
    const int dc = c.col - self.col;
    if (std::abs(dr) > r || std::abs(dc) > r) return;
    obs[channel * side * side + (dr + r) * side + (dc + r)] = 1.0;
  };
  for (std::size_t i = 0; i < predators_.size(); ++i) {
    if (i != agent) mark(0, predators_[i]);
  }
  for (std::size_t j = 0; j < prey_.size(); ++j) {
    if (alive_[j]) mark(1, prey_[j]);
  }
  obs[2 * side * side] = normalized(self.row, spec_.height);
  obs[2 * side * side + 1] = normalized(self.col, spec_.width);
  return obs;
}

std::vector<double> PredatorPrey::global_state() const {
  std::vector<double> s;
  s.reserve(state_dim());
  for (const Cell& p : predators_) {
    s.push_back(normalized(p.row, spec_.height));
    s.push_back(normalized(p.col, spec_.width));
  }
  for (std::size_t j = 0; j < prey_.size(); ++j) {
    s.push_back(alive_[j] ? normalized(prey_[j].row, spec_.height) : 0.0);
    s.push_back(alive_[j] ? normalized(prey_[j].col, spec_.width) : 0.0);
    s.push_back(alive_[j] ? 1.0 : 0.0);
  }
  return s;
}

}  // namespace marl::envs
