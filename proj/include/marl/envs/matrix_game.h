#pragma once

#include <vector>

#include "marl/envs/env.h"

namespace marl::envs {

using Payoff = std::vector<std::vector<double>>;

// The non-monotonic 3x3 game and its reward-shaped variant.
Payoff table1_payoff();
Payoff table7_payoff();

struct MatrixGameSpec {
  Payoff payoff = table1_payoff();  // payoff[u1][u2], square

  std::vector<std::string> validate() const;

  friend bool operator==(const MatrixGameSpec&, const MatrixGameSpec&) = default;
};

// One-shot two-agent game. State is [0], observations are agent one-hots,
// and the only step ends the episode with reward payoff[u1][u2].
class MatrixGame final : public Env {
 public:
  explicit MatrixGame(MatrixGameSpec spec);

  void reset(Rng& rng) override;
  StepResult step(std::span<const int> actions) override;
  std::vector<double> observe(std::size_t agent) const override;
  std::vector<double> global_state() const override { return {0.0}; }

  std::size_t n_agents() const override { return 2; }
  std::size_t n_actions() const override { return spec_.payoff.size(); }
  std::size_t obs_dim() const override { return 2; }
  std::size_t state_dim() const override { return 1; }
  std::size_t episode_limit() const override { return 1; }
  std::string name() const override { return "matrix"; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<MatrixGame>(*this); }

  const MatrixGameSpec& spec() const noexcept { return spec_; }
  double best_payoff() const noexcept { return best_; }

 private:
  MatrixGameSpec spec_;
  double best_ = 0.0;
  bool done_ = true;
};

}  // namespace marl::envs
