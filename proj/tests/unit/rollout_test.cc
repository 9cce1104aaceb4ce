#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "marl/common/error.h"
#include "marl/envs/matrix_game.h"
#include "marl/envs/predator_prey.h"
#include "marl/rollout/epsilon.h"
#include "marl/rollout/replay_buffer.h"
#include "marl/rollout/select.h"
#include "marl/rollout/workers.h"

namespace marl::rollout {
namespace {

using ad::Tensor;

TEST(Epsilon, Endpoints) {
  const EpsilonSchedule s{1.0, 0.05, 50000};
  EXPECT_EQ(epsilon_at(s, 0), 1.0);
  EXPECT_EQ(epsilon_at(s, 50000), 0.05);
  EXPECT_DOUBLE_EQ(epsilon_at(s, 25000), 0.525);
  EXPECT_EQ(epsilon_at(s, 10'000'000), 0.05);
}

TEST(Epsilon, NonIncreasing) {
  const EpsilonSchedule s{1.0, 0.05, 1000};
  double prev = epsilon_at(s, 0);
  for (std::uint64_t t = 1; t < 1500; ++t) {
    const double e = epsilon_at(s, t);
    EXPECT_LE(e, prev);
    prev = e;
  }
}

TEST(Epsilon, ZeroAnnealIsFinishImmediately) {
  EXPECT_EQ(epsilon_at({1.0, 0.05, 0}, 0), 0.05);
}

TEST(Epsilon, ValidateNamesKeys) {
  const auto issues = EpsilonSchedule{1.5, 0.05, 10}.validate("e");
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_NE(issues[0].find("e.start"), std::string::npos);
}

TEST(Select, ZeroEpsilonIsArgmax) {
  Rng rng(1);
  const Tensor q = Tensor::from_rows({{0.1, 0.9, 0.3}, {2.0, -1.0, 1.0}});
  for (int k = 0; k < 100; ++k) {
    EXPECT_EQ(select_actions(q, 0.0, SelectMode::kGreedy, rng), (std::vector<int>{1, 0}));
  }
}

TEST(Select, TiesGoToLowestIndex) {
  Rng rng(1);
  const Tensor q = Tensor::from_rows({{1.0, 1.0, 0.0}});
  EXPECT_EQ(select_actions(q, 0.0, SelectMode::kGreedy, rng), std::vector<int>{0});
}

// Binomial bound: each count ~ Bin(N, 1/k); |count - N/k| <= 3 sqrt(N p (1-p)).
TEST(Select, FullEpsilonIsUniform) {
  Rng rng(2);
  const Tensor q = Tensor::from_rows({{5.0, 0.0, 0.0, 0.0, 0.0}});
  const int N = 10000;
  std::vector<int> counts(5, 0);
  for (int k = 0; k < N; ++k) ++counts[select_actions(q, 1.0, SelectMode::kGreedy, rng)[0]];
  const double p = 0.2;
  const double sigma = std::sqrt(N * p * (1 - p));
  for (int c : counts) EXPECT_LE(std::abs(c - N * p), 3 * sigma);
}

TEST(Select, SampleFollowsDistribution) {
  Rng rng(3);
  const Tensor pi = Tensor::from_rows({{0.7, 0.0, 0.3}});
  const int N = 10000;
  std::vector<int> counts(3, 0);
  for (int k = 0; k < N; ++k) ++counts[select_actions(pi, 0.0, SelectMode::kSample, rng)[0]];
  EXPECT_EQ(counts[1], 0);
  EXPECT_LE(std::abs(counts[0] - 0.7 * N), 3 * std::sqrt(N * 0.21));
}

TEST(Select, SampleRejectsNonDistribution) {
  Rng rng(3);
  EXPECT_THROW(select_actions(Tensor::from_rows({{0.5, 0.2}}), 0.0, SelectMode::kSample, rng),
               Error);
  EXPECT_THROW(select_actions(Tensor::from_rows({{1.5, -0.5}}), 0.0, SelectMode::kSample, rng),
               Error);
}

Episode fake_episode(std::size_t length, double tag, bool terminated = true) {
  Episode e;
  e.n_agents = 2;
  e.n_actions = 3;
  e.obs_dim = 1;
  e.state_dim = 1;
  for (std::size_t t = 0; t <= length; ++t) {
    e.states.push_back({tag + static_cast<double>(t)});
    e.obs.push_back({tag, -tag});
  }
  for (std::size_t t = 0; t < length; ++t) {
    e.actions.push_back({1, 2});
    e.rewards.push_back(tag);
  }
  e.terminated = terminated;
  e.truncated = !terminated;
  return e;
}

TEST(ReplayBuffer, FifoEviction) {
  ReplayBuffer buf(2);
  buf.insert(fake_episode(1, 1));
  buf.insert(fake_episode(1, 2));
  buf.insert(fake_episode(1, 3));
  ASSERT_EQ(buf.size(), 2u);
  EXPECT_EQ(buf[0].rewards[0], 2.0);
  EXPECT_EQ(buf[1].rewards[0], 3.0);
  EXPECT_EQ(buf.inserted(), 3u);
}

TEST(ReplayBuffer, FullSampleIsPermutation) {
  ReplayBuffer buf(10);
  for (int k = 0; k < 6; ++k) buf.insert(fake_episode(2, k));
  Rng rng(4);
  const EpisodeBatch batch = buf.sample(6, rng);
  std::multiset<double> tags;
  for (std::size_t b = 0; b < 6; ++b) tags.insert(batch.reward.data()[b * batch.steps]);
  EXPECT_EQ(tags, (std::multiset<double>{0, 1, 2, 3, 4, 5}));
}

TEST(ReplayBuffer, SampleWithoutReplacementWithinCall) {
  ReplayBuffer buf(50);
  for (int k = 0; k < 50; ++k) buf.insert(fake_episode(1, k));
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const EpisodeBatch batch = buf.sample(20, rng);
    std::set<double> tags;
    for (std::size_t b = 0; b < 20; ++b) tags.insert(batch.reward.data()[b]);
    EXPECT_EQ(tags.size(), 20u);
  }
}

TEST(ReplayBuffer, UnderfullIsError) {
  ReplayBuffer buf(4);
  buf.insert(fake_episode(1, 0));
  Rng rng(0);
  EXPECT_THROW(buf.sample(2, rng), Error);
  EXPECT_THROW(buf.latest(2), Error);
}

TEST(ReplayBuffer, LatestReturnsMostRecent) {
  ReplayBuffer buf(10);
  for (int k = 0; k < 5; ++k) buf.insert(fake_episode(1, k));
  const EpisodeBatch batch = buf.latest(2);
  EXPECT_EQ(batch.reward.data()[0], 3.0);
  EXPECT_EQ(batch.reward.data()[1], 4.0);
}

TEST(EpisodeBatch, PaddingAndMask) {
  const Episode a = fake_episode(3, 1.0);
  const Episode b = fake_episode(1, 2.0, false);
  const Episode* eps[] = {&a, &b};
  const EpisodeBatch batch = make_batch(eps);
  ASSERT_EQ(batch.steps, 3u);
  double mask_sum = 0.0;
  for (double m : batch.mask.values()) mask_sum += m;
  EXPECT_EQ(mask_sum, 4.0);
  EXPECT_EQ(std::vector<double>(batch.mask.values().begin(), batch.mask.values().end()),
            (std::vector<double>{1, 1, 1, 1, 0, 0}));
  EXPECT_EQ(std::vector<double>(batch.terminated.values().begin(), batch.terminated.values().end()),
            (std::vector<double>{0, 0, 1, 0, 0, 0}));
  // Padded steps carry zeros everywhere.
  for (std::size_t t = 1; t < 3; ++t) {
    EXPECT_EQ(batch.reward.data()[3 + t], 0.0);
    EXPECT_EQ(batch.actions[(t * 2 + 1) * 2], 0);
    EXPECT_EQ(batch.actions[(t * 2 + 1) * 2 + 1], 0);
  }
  for (std::size_t t = 3; t <= 3; ++t) EXPECT_EQ(batch.states.data()[t * 2 + 1], 0.0);
  // Bootstrap state after the truncated episode's last step is kept.
  EXPECT_EQ(batch.states.data()[1 * 2 + 1], 3.0);
  EXPECT_EQ(batch.obs.data()[(0 * 2 + 1) * 2 + 1], -2.0);
}

// Real buffers: no padded step ever has mask 1, and masks sum to lengths.
TEST(EpisodeBatch, MaskMatchesLengthsOnRealEpisodes) {
  envs::PredatorPreySpec spec;
  spec.width = 4;
  spec.height = 4;
  spec.n_predators = 2;
  spec.n_prey = 1;
  spec.episode_limit = 15;
  envs::PredatorPrey env(spec);
  ReplayBuffer buf(30);
  Rng rng(6);
  RandomPolicy policy(6);
  for (int k = 0; k < 30; ++k) buf.insert(run_episode(env, policy, rng));
  for (int trial = 0; trial < 20; ++trial) {
    const EpisodeBatch batch = buf.sample(8, rng);
    for (std::size_t b = 0; b < 8; ++b) {
      for (std::size_t t = 0; t < batch.steps; ++t) {
        EXPECT_EQ(batch.mask.data()[b * batch.steps + t], t < batch.lengths[b] ? 1.0 : 0.0);
      }
    }
  }
}

TEST(RunEpisode, MatrixGameHasLengthOne) {
  envs::MatrixGame env({envs::table1_payoff()});
  Rng rng(7);
  RandomPolicy policy(3);
  const Episode e = run_episode(env, policy, rng);
  EXPECT_EQ(e.length(), 1u);
  EXPECT_TRUE(e.terminated);
  EXPECT_EQ(e.states.size(), 2u);
}

TEST(RunEpisode, AllStayTruncatesWithZeroReturn) {
  envs::PredatorPrey env({});
  Rng rng(8);
  ScriptedPolicy stay([](std::span<const double>, Rng&) {
    return std::vector<int>(8, envs::PredatorPrey::kStay);
  });
  const Episode e = run_episode(env, stay, rng);
  EXPECT_EQ(e.length(), 200u);
  EXPECT_TRUE(e.truncated);
  EXPECT_FALSE(e.terminated);
  EXPECT_EQ(e.total_return(), 0.0);
}

TEST(RunEpisode, EnvErrorCarriesContext) {
  envs::MatrixGame env({envs::table1_payoff()});
  Rng rng(9);
  ScriptedPolicy bad([](std::span<const double>, Rng&) { return std::vector<int>{0, 7}; });
  try {
    run_episode(env, bad, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("matrix step 0"), std::string::npos);
  }
}

nets::AgentNet small_net(const envs::Env& env, std::uint64_t seed) {
  Rng rng(seed);
  return nets::AgentNet({env.obs_dim(), env.n_actions(), env.n_agents(), 8}, rng);
}

envs::PredatorPreySpec small_pp() {
  envs::PredatorPreySpec spec;
  spec.width = 5;
  spec.height = 5;
  spec.n_predators = 3;
  spec.n_prey = 2;
  spec.episode_limit = 25;
  return spec;
}

bool same(const Episode& a, const Episode& b) {
  return a.states == b.states && a.obs == b.obs && a.actions == b.actions &&
         a.rewards == b.rewards && a.terminated == b.terminated;
}

TEST(Workers, SameSeedSameEpisodes) {
  envs::PredatorPrey env(small_pp());
  const nets::AgentNet net = small_net(env, 1);
  PolicyFactory factory = [&] { return std::make_unique<GreedyPolicy>(net, 0.3); };
  RolloutWorkers a(env, 1, 11);
  RolloutWorkers b(env, 1, 11);
  for (int k = 0; k < 3; ++k) {
    const auto ea = a.collect(factory);
    const auto eb = b.collect(factory);
    ASSERT_EQ(ea.size(), 1u);
    EXPECT_TRUE(same(ea[0], eb[0]));
  }
}

// Worker w of a parallel set reproduces a serial run on stream worker_seed(seed, w).
TEST(Workers, ParallelEpisodesIndependentOfScheduling) {
  envs::PredatorPrey env(small_pp());
  const nets::AgentNet net = small_net(env, 2);
  PolicyFactory factory = [&] { return std::make_unique<SoftmaxPolicy>(net, false); };
  RolloutWorkers par(env, 4, 12);
  std::vector<std::vector<Episode>> got;
  for (int k = 0; k < 2; ++k) got.push_back(par.collect(factory));
  for (std::size_t w = 0; w < 4; ++w) {
    envs::PredatorPrey solo(small_pp());
    Rng rng(worker_seed(12, w));
    SoftmaxPolicy policy(net, false);
    for (int k = 0; k < 2; ++k) EXPECT_TRUE(same(got[k][w], run_episode(solo, policy, rng)));
  }
}

TEST(Workers, StepAccounting) {
  envs::PredatorPrey env(small_pp());
  RolloutWorkers workers(env, 3, 13);
  PolicyFactory factory = [&] { return std::make_unique<RandomPolicy>(6); };
  std::size_t total = 0;
  std::size_t counted = 0;
  for (int k = 0; k < 5; ++k) {
    for (const Episode& e : workers.collect(factory)) {
      total += e.length();
      counted += e.actions.size();
    }
  }
  EXPECT_EQ(total, counted);
  EXPECT_GT(total, 0u);
}

TEST(Workers, EvaluationDoesNotPerturbTraining) {
  envs::PredatorPrey env(small_pp());
  PolicyFactory factory = [&] { return std::make_unique<RandomPolicy>(6); };
  RolloutWorkers a(env, 2, 14);
  RolloutWorkers b(env, 2, 14);
  a.evaluate(factory, 5);
  const auto ea = a.collect(factory);
  const auto eb = b.collect(factory);
  for (std::size_t w = 0; w < 2; ++w) EXPECT_TRUE(same(ea[w], eb[w]));
  EXPECT_EQ(a.evaluate(factory, 7).size(), 7u);
}

TEST(Workers, ErrorsPropagateFromThreads) {
  envs::MatrixGame env({envs::table1_payoff()});
  RolloutWorkers workers(env, 2, 15);
  PolicyFactory factory = [] {
    return std::make_unique<ScriptedPolicy>(
        [](std::span<const double>, Rng&) { return std::vector<int>{9, 9}; });
  };
  EXPECT_THROW(workers.collect(factory), Error);
}

}  // namespace
}  // namespace marl::rollout
