#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "marl/common/error.h"
#include "marl/envs/env_config.h"
#include "marl/envs/trace.h"

namespace marl::envs {
namespace {

using Cell = PredatorPrey::Cell;

TEST(MatrixGame, ResetGivesDummyStateAndOneHotObservations) {
  MatrixGame g({table1_payoff()});
  Rng rng(1);
  g.reset(rng);
  EXPECT_EQ(g.global_state(), std::vector<double>{0.0});
  EXPECT_EQ(g.observe(0), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(g.observe(1), (std::vector<double>{0.0, 1.0}));
}

double play(MatrixGame& g, int a, int b) {
  Rng rng(0);
  g.reset(rng);
  const int actions[] = {a, b};
  const StepResult r = g.step(actions);
  EXPECT_TRUE(r.terminated);
  EXPECT_FALSE(r.truncated);
  return r.reward;
}

TEST(MatrixGame, Table1Payoffs) {
  MatrixGame g({table1_payoff()});
  EXPECT_EQ(play(g, 0, 0), 12.0);
  EXPECT_EQ(play(g, 0, 1), -12.0);
  EXPECT_EQ(play(g, 1, 1), 0.0);
}

TEST(MatrixGame, Table7Payoffs) {
  MatrixGame g({table7_payoff()});
  EXPECT_EQ(play(g, 0, 1), -0.5);
  EXPECT_EQ(play(g, 0, 0), 12.0);
}

TEST(MatrixGame, ExactlyOneStepPerEpisode) {
  MatrixGame g({table1_payoff()});
  play(g, 2, 2);
  const int actions[] = {0, 0};
  EXPECT_THROW(g.step(actions), Error);
  Rng rng(0);
  g.reset(rng);
  const int bad[] = {0, 3};
  EXPECT_THROW(g.step(bad), Error);
}

TEST(MatrixGame, NonSquarePayoffRejected) {
  EXPECT_THROW(MatrixGame({{{1, 2}, {3}}}), ConfigError);
}

TEST(PredatorPrey, SameSeedSameLayout) {
  PredatorPrey a({});
  PredatorPrey b({});
  Rng ra(42);
  Rng rb(42);
  a.reset(ra);
  b.reset(rb);
  EXPECT_EQ(a.predators(), b.predators());
  EXPECT_EQ(a.prey(), b.prey());
}

TEST(PredatorPrey, EntitiesOnDistinctCells) {
  PredatorPrey env({});
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    env.reset(rng);
    std::set<std::pair<int, int>> cells;
    for (const Cell& c : env.predators()) cells.insert({c.row, c.col});
    for (const Cell& c : env.prey()) cells.insert({c.row, c.col});
    EXPECT_EQ(cells.size(), 16u);
  }
}

TEST(PredatorPrey, GridTooSmallRejected) {
  PredatorPreySpec spec;
  spec.width = 3;
  spec.height = 3;
  EXPECT_THROW(PredatorPrey{spec}, ConfigError);
}

PredatorPreySpec small_spec(int predators, int prey, double penalty = 0.0) {
  PredatorPreySpec s;
  s.width = 5;
  s.height = 5;
  s.n_predators = predators;
  s.n_prey = prey;
  s.lone_catch_penalty = penalty;
  s.episode_limit = 20;
  return s;
}

TEST(PredatorPrey, TwoCatchersCaptureAndRemovePrey) {
  PredatorPrey env(small_spec(2, 1));
  Rng rng(5);
  env.set_layout({{2, 1}, {2, 3}}, {{2, 2}}, rng);
  const int actions[] = {PredatorPrey::kCatch, PredatorPrey::kCatch};
  const StepResult r = env.step(actions);
  EXPECT_EQ(r.reward, 10.0);
  EXPECT_TRUE(r.terminated);
  EXPECT_TRUE(r.won);
  EXPECT_FALSE(env.prey_alive()[0]);
}

TEST(PredatorPrey, LoneCatchPenalty) {
  for (double p : {0.0, -2.0}) {
    PredatorPrey env(small_spec(2, 1, p));
    Rng rng(6);
    env.set_layout({{2, 1}, {0, 4}}, {{2, 2}}, rng);
    const int actions[] = {PredatorPrey::kCatch, PredatorPrey::kStay};
    const StepResult r = env.step(actions);
    EXPECT_EQ(r.reward, p);
    EXPECT_TRUE(env.prey_alive()[0]);
  }
}

TEST(PredatorPrey, CatchWithoutAdjacentPreyIsFree) {
  PredatorPrey env(small_spec(2, 1, -2.0));
  Rng rng(6);
  env.set_layout({{0, 0}, {0, 4}}, {{4, 2}}, rng);
  const int actions[] = {PredatorPrey::kCatch, PredatorPrey::kCatch};
  EXPECT_EQ(env.step(actions).reward, 0.0);
}

TEST(PredatorPrey, MovementBlockedByWallsAndEntities) {
  PredatorPrey env(small_spec(2, 1));
  Rng rng(7);
  env.set_layout({{0, 0}, {0, 1}}, {{4, 4}}, rng);
  const int actions[] = {PredatorPrey::kRight, PredatorPrey::kUp};
  env.step(actions);
  // Agent 0 is blocked by agent 1, which is blocked by the wall.
  EXPECT_EQ(env.predators()[0], (Cell{0, 0}));
  EXPECT_EQ(env.predators()[1], (Cell{0, 1}));
  const int follow[] = {PredatorPrey::kDown, PredatorPrey::kLeft};
  env.step(follow);
  // Index order: agent 0 vacates (0,0) before agent 1 moves into it.
  EXPECT_EQ(env.predators()[0], (Cell{1, 0}));
  EXPECT_EQ(env.predators()[1], (Cell{0, 0}));
}

TEST(PredatorPrey, ObservationLayout) {
  PredatorPrey env(small_spec(2, 1));
  Rng rng(8);
  env.set_layout({{2, 2}, {4, 4}}, {{1, 2}}, rng);
  const std::vector<double> obs = env.observe(0);
  ASSERT_EQ(obs.size(), 2u * 25u + 2u);
  EXPECT_EQ(env.obs_dim(), obs.size());
  // Prey one row up: offset (-1, 0) -> index (1*5 + 2) in the prey channel.
  for (std::size_t k = 0; k < 25; ++k) EXPECT_EQ(obs[25 + k], k == 7 ? 1.0 : 0.0) << k;
  // The other predator at (+2, +2) sits in the far corner.
  for (std::size_t k = 0; k < 25; ++k) EXPECT_EQ(obs[k], k == 24 ? 1.0 : 0.0) << k;
  EXPECT_DOUBLE_EQ(obs[50], 0.5);
  EXPECT_DOUBLE_EQ(obs[51], 0.5);
}

TEST(PredatorPrey, EmptyNeighbourhoodGivesZeroChannels) {
  PredatorPreySpec spec = small_spec(2, 1);
  spec.width = 10;
  spec.height = 10;
  PredatorPrey env(spec);
  Rng rng(9);
  env.set_layout({{0, 0}, {9, 9}}, {{0, 9}}, rng);
  const std::vector<double> obs = env.observe(0);
  for (std::size_t k = 0; k < 50; ++k) EXPECT_EQ(obs[k], 0.0);
}

TEST(PredatorPrey, GlobalStateContents) {
  PredatorPrey env(small_spec(2, 2));
  Rng rng(10);
  env.set_layout({{0, 0}, {4, 4}}, {{2, 1}, {2, 3}}, rng);
  const std::vector<double> s = env.global_state();
  ASSERT_EQ(s.size(), env.state_dim());
  EXPECT_EQ(s.size(), 2u * 2u + 3u * 2u);
  EXPECT_EQ(s[0], 0.0);
  EXPECT_EQ(s[2], 1.0);
  EXPECT_EQ(s[4], 0.5);
  EXPECT_EQ(s[5], 0.25);
  EXPECT_EQ(s[6], 1.0);
}

TEST(PredatorPrey, AllStayTruncatesWithZeroReturn) {
  PredatorPrey env({});
  Rng rng(11);
  env.reset(rng);
  const std::vector<int> stay(8, PredatorPrey::kStay);
  double total = 0.0;
  int steps = 0;
  StepResult r;
  do {
    r = env.step(stay);
    total += r.reward;
    ++steps;
  } while (!r.done());
  EXPECT_TRUE(r.truncated);
  EXPECT_FALSE(r.terminated);
  EXPECT_EQ(steps, 200);
  EXPECT_EQ(total, 0.0);
  EXPECT_THROW(env.step(stay), Error);
}

TEST(PredatorPrey, ActionOutOfRangeRejected) {
  PredatorPrey env(small_spec(2, 1));
  Rng rng(12);
  env.reset(rng);
  const int bad[] = {0, 6};
  EXPECT_THROW(env.step(bad), Error);
}

std::vector<int> random_actions(const Env& env, Rng& rng) {
  std::vector<int> a(env.n_agents());
  for (int& v : a) v = static_cast<int>(uniform_index(rng, env.n_actions()));
  return a;
}

TEST(PredatorPrey, RandomPlayRewardBoundsAndPreyNeverReturns) {
  PredatorPreySpec spec = small_spec(4, 3);
  spec.width = 4;
  spec.height = 4;
  spec.episode_limit = 60;
  PredatorPrey env(spec);
  Rng rng(13);
  for (int episode = 0; episode < 200; ++episode) {
    env.reset(rng);
    double total = 0.0;
    std::vector<bool> seen_dead(3, false);
    StepResult r;
    do {
      r = env.step(random_actions(env, rng));
      EXPECT_GE(r.reward, 0.0);
      total += r.reward;
      for (std::size_t j = 0; j < 3; ++j) {
        if (seen_dead[j]) {
          EXPECT_FALSE(env.prey_alive()[j]);
        }
        seen_dead[j] = !env.prey_alive()[j];
      }
      for (const Cell& c : env.predators()) {
        EXPECT_TRUE(c.row >= 0 && c.row < 4 && c.col >= 0 && c.col < 4);
      }
    } while (!r.done());
    EXPECT_LE(total, 3 * 10.0);
    EXPECT_EQ(std::fmod(total, 10.0), 0.0);
  }
}

TEST(Trace, ReplayIsDeterministic) {
  PredatorPrey env({});
  std::ostringstream first;
  std::ostringstream second;
  Rng a(77);
  Rng b(77);
  const auto ra = trace_episode(env, a, random_actions, &first);
  const auto rb = trace_episode(env, b, random_actions, &second);
  EXPECT_EQ(first.str(), second.str());
  EXPECT_EQ(ra.size(), rb.size());
  std::istringstream lines(first.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("{\"actions\":[", 0), 0u);
  EXPECT_NE(line.find("\"t\":0"), std::string::npos);
}

TEST(EnvConfig, FactoryAndKinds) {
  EnvConfig cfg;
  EXPECT_EQ(make_env(cfg)->name(), "matrix");
  cfg.kind = EnvKind::kPredatorPrey;
  auto env = make_env(cfg);
  EXPECT_EQ(env->n_agents(), 8u);
  EXPECT_EQ(env->state_dim(), 40u);
  EXPECT_THROW(env_kind_from_string("smac"), ConfigError);
}

}  // namespace
}  // namespace marl::envs
