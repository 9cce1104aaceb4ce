#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "marl/common/error.h"
#include "marl/returns/returns.h"

namespace marl::returns {
namespace {

struct Episode {
  Tensor r, next, term, mask;
};

Episode single_row(std::vector<double> r, std::vector<double> next, std::vector<double> term) {
  const std::size_t n = r.size();
  return {Tensor({1, n}, std::move(r)), Tensor({1, n}, std::move(next)),
          Tensor({1, n}, std::move(term)), Tensor({1, n}, 1.0)};
}

// Explicit lambda-return: (1 - lambda) sum_n lambda^(n-1) G_{s:s+n} over the
// n-step returns that stay inside the episode, with the remaining weight on
// the longest one. G_{s:s+n} sums n rewards and bootstraps from the value of
// the state reached after step s+n-1 unless the episode terminated first.
double brute_force(const Tensor& r, const Tensor& next, const Tensor& term, std::size_t b,
                   std::size_t s, std::size_t len, double lambda, double gamma) {
  const std::size_t horizon = len - s;
  auto n_step = [&](std::size_t n) {
    double g = 0.0;
    double discount = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      g += discount * r.at(b, s + k);
      if (term.at(b, s + k) != 0.0) return g;
      discount *= gamma;
    }
    return g + discount * next.at(b, s + n - 1);
  };
  double total = 0.0;
  for (std::size_t n = 1; n < horizon; ++n) total += (1.0 - lambda) * std::pow(lambda, n - 1) * n_step(n);
  return total + std::pow(lambda, horizon - 1) * n_step(horizon);
}

TEST(OneStep, Examples) {
  Episode e = single_row({5.0}, {100.0}, {1.0});
  EXPECT_DOUBLE_EQ(one_step_targets(e.r, e.next, e.term, e.mask, 0.9)[0], 5.0);
  e = single_row({1.0}, {3.0}, {0.0});
  EXPECT_DOUBLE_EQ(one_step_targets(e.r, e.next, e.term, e.mask, 0.9)[0], 1.0 + 0.9 * 3.0);
  Tensor r = Tensor::from_rows({{1.0, 7.0}});
  Tensor mask = Tensor::from_rows({{1.0, 0.0}});
  const Tensor y = one_step_targets(r, Tensor({1, 2}, 2.0), Tensor({1, 2}), mask, 0.9);
  EXPECT_EQ(y[1], 0.0);
}

TEST(OneStep, LengthMismatchRejected) {
  EXPECT_THROW(one_step_targets(Tensor({1, 3}), Tensor({1, 2}), Tensor({1, 3}), Tensor({1, 3}), 0.9),
               ShapeError);
}

TEST(Lambda, RangeChecked) {
  const Episode e = single_row({1.0}, {1.0}, {0.0});
  EXPECT_THROW(peng_q_lambda_targets(e.r, e.next, e.term, e.mask, 1.5, 0.9), Error);
  EXPECT_THROW(td_lambda_targets(e.r, e.next, e.term, e.mask, -0.1, 0.9), Error);
  EXPECT_NO_THROW(td_lambda_targets(e.r, e.next, e.term, e.mask, 1.0, 0.9));
}

TEST(Lambda, MonteCarloAtLambdaOne) {
  const Episode e = single_row({1.0, 2.0}, {3.0, 0.0}, {0.0, 1.0});
  const Tensor g = peng_q_lambda_targets(e.r, e.next, e.term, e.mask, 1.0, 0.9);
  EXPECT_DOUBLE_EQ(g[1], 2.0);
  EXPECT_DOUBLE_EQ(g[0], 1.0 + 0.9 * 2.0);
}

TEST(Lambda, HalfLambdaExample) {
  const Episode e = single_row({1.0, 2.0}, {3.0, 0.0}, {0.0, 1.0});
  for (const Tensor& g : {peng_q_lambda_targets(e.r, e.next, e.term, e.mask, 0.5, 0.9),
                          td_lambda_targets(e.r, e.next, e.term, e.mask, 0.5, 0.9)}) {
    EXPECT_DOUBLE_EQ(g[1], 2.0);
    EXPECT_NEAR(g[0], 3.25, 1e-15);
    EXPECT_NEAR(g[0], brute_force(e.r, e.next, e.term, 0, 0, 2, 0.5, 0.9), 1e-15);
  }
}

TEST(Lambda, TerminalStepIgnoresBootstrap) {
  const Episode e = single_row({1.0, 2.0}, {3.0, NAN}, {0.0, 1.0});
  const Tensor g = peng_q_lambda_targets(e.r, e.next, e.term, e.mask, 0.5, 0.9);
  EXPECT_TRUE(g.all_finite());
}

TEST(Lambda, TruncatedEpisodeBootstrapsAtLastStep) {
  const Episode e = single_row({0.0, 1.0}, {2.0, 4.0}, {0.0, 0.0});
  const Tensor g = td_lambda_targets(e.r, e.next, e.term, e.mask, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(g[1], 1.0 + 0.5 * 4.0);
  EXPECT_DOUBLE_EQ(g[0], 0.5 * 3.0);
}

Episode random_batch(std::mt19937_64& rng, std::size_t batch, std::size_t steps) {
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  Episode e{Tensor({batch, steps}), Tensor({batch, steps}), Tensor({batch, steps}),
            Tensor({batch, steps})};
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t len = 1 + rng() % steps;
    const bool terminal = rng() % 2 == 0;
    for (std::size_t t = 0; t < len; ++t) {
      e.r.at(b, t) = value(rng);
      e.next.at(b, t) = value(rng);
      e.mask.at(b, t) = 1.0;
    }
    if (terminal) e.term.at(b, len - 1) = 1.0;
  }
  return e;
}

TEST(Lambda, EndpointIdentitiesOnRandomEpisodes) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Episode e = random_batch(rng, 4, 6);
    const Tensor one = one_step_targets(e.r, e.next, e.term, e.mask, 0.95);
    const Tensor g0 = peng_q_lambda_targets(e.r, e.next, e.term, e.mask, 0.0, 0.95);
    const Tensor g1 = td_lambda_targets(e.r, e.next, e.term, e.mask, 1.0, 0.95);
    for (std::size_t b = 0; b < 4; ++b) {
      // Monte Carlo by direct discounted sum.
      std::size_t len = 0;
      while (len < 6 && e.mask.at(b, len) != 0.0) ++len;
      for (std::size_t s = 0; s < len; ++s) {
        double mc = 0.0;
        double discount = 1.0;
        for (std::size_t k = s; k < len; ++k) {
          mc += discount * e.r.at(b, k);
          discount *= 0.95;
        }
        if (e.term.at(b, len - 1) == 0.0) mc += discount * e.next.at(b, len - 1);
        EXPECT_NEAR(g1.at(b, s), mc, 1e-12);
      }
    }
    for (std::size_t i = 0; i < one.size(); ++i) EXPECT_NEAR(g0[i], one[i], 1e-12);
  }
}

TEST(Lambda, RecursionMatchesExplicitExpansion) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Episode e = random_batch(rng, 3, 6);
    const double lambda = unit(rng);
    const double gamma = 0.99 * unit(rng);
    const Tensor g = td_lambda_targets(e.r, e.next, e.term, e.mask, lambda, gamma);
    for (std::size_t b = 0; b < 3; ++b) {
      std::size_t len = 0;
      while (len < 6 && e.mask.at(b, len) != 0.0) ++len;
      for (std::size_t s = 0; s < 6; ++s) {
        if (s >= len) {
          EXPECT_EQ(g.at(b, s), 0.0);
          continue;
        }
        EXPECT_NEAR(g.at(b, s), brute_force(e.r, e.next, e.term, b, s, len, lambda, gamma), 1e-9);
      }
    }
  }
}

TEST(Lambda, ConstantValueGeometricSeries) {
  const double gamma = 0.9;
  const double lambda = 0.6;
  const double c = 2.5;
  for (std::size_t steps : {5u, 50u, 400u}) {
    const Episode e{Tensor({1, steps}), Tensor({1, steps}, c), Tensor({1, steps}), Tensor({1, steps}, 1.0)};
    const double g0 = td_lambda_targets(e.r, e.next, e.term, e.mask, lambda, gamma)[0];
    const double n = static_cast<double>(steps);
    const double finite = c * ((1.0 - lambda) * gamma * (1.0 - std::pow(gamma * lambda, n - 1)) /
                                   (1.0 - gamma * lambda) +
                               std::pow(lambda, n - 1) * std::pow(gamma, n));
    EXPECT_NEAR(g0, finite, 1e-12);
    if (steps == 400) EXPECT_NEAR(g0, gamma * c * (1.0 - lambda) / (1.0 - gamma * lambda), 1e-12);
  }
}

TEST(Lambda, MaskMustBeAPrefix) {
  const Tensor r({1, 3});
  const Tensor mask = Tensor::from_rows({{1.0, 0.0, 1.0}});
  EXPECT_THROW(td_lambda_targets(r, r, r, mask, 0.5, 0.9), Error);
}

}  // namespace
}  // namespace marl::returns
