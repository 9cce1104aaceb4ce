#pragma once

#include <array>
#include <vector>

#include "marl/envs/env.h"

namespace marl::envs {

struct PredatorPreySpec {
  int width = 10;
  int height = 10;
  int n_predators = 8;
  int n_prey = 8;
  int episode_limit = 200;
  double capture_reward = 10.0;
  double lone_catch_penalty = 0.0;  // added to the reward, so normally <= 0
  int obs_radius = 2;

  std::vector<std::string> validate() const;

  friend bool operator==(const PredatorPreySpec&, const PredatorPreySpec&) = default;
};

// Grid pursuit where a prey is captured only when at least two adjacent
// predators choose "catch" in the same step.
//
// Step order: predators move in index order (off-grid or occupied targets
// mean staying put); captures are resolved; surviving prey then move
// uniformly at random among their free moves (including staying).
class PredatorPrey final : public Env {
 public:
  enum Action : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kStay = 4, kCatch = 5 };
  struct Cell {
    int row = 0;
    int col = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
  };

  explicit PredatorPrey(PredatorPreySpec spec);

  void reset(Rng& rng) override;
  StepResult step(std::span<const int> actions) override;
  std::vector<double> observe(std::size_t agent) const override;
  std::vector<double> global_state() const override;

  std::size_t n_agents() const override { return spec_.n_predators; }
  std::size_t n_actions() const override { return 6; }
  std::size_t obs_dim() const override;
  std::size_t state_dim() const override;
  std::size_t episode_limit() const override { return spec_.episode_limit; }
  std::string name() const override { return "predator_prey"; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<PredatorPrey>(*this); }

  const PredatorPreySpec& spec() const noexcept { return spec_; }
  const std::vector<Cell>& predators() const noexcept { return predators_; }
  const std::vector<Cell>& prey() const noexcept { return prey_; }
  const std::vector<bool>& prey_alive() const noexcept { return alive_; }
  int steps() const noexcept { return t_; }

  // Places entities explicitly (for fixtures); starts a fresh episode.
  void set_layout(std::vector<Cell> predators, std::vector<Cell> prey, Rng& rng);

 private:
  bool inside(Cell c) const;
  bool occupied(Cell c) const;
  static Cell moved(Cell c, int action);

  PredatorPreySpec spec_;
  std::vector<Cell> predators_;
  std::vector<Cell> prey_;
  std::vector<bool> alive_;
  Rng prey_rng_;
  int t_ = 0;
  bool done_ = true;
};

}  // namespace marl::envs
