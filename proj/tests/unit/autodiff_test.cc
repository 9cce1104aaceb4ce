#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "marl/autodiff/grad_check.h"
#include "marl/autodiff/ops.h"
#include "marl/common/error.h"

namespace marl::ad {
namespace {

Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = dist(rng);
  return t;
}

TEST(Tensor, ShapeMustMatchValues) {
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), ShapeError);
  EXPECT_THROW(Tensor({1, 2, 3}), ShapeError);
  Tensor t({2, 3}, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.cols(), 3u);
}

TEST(Ops, AbsOfRow) {
  Tape tape;
  Var y = abs(tape.constant(Tensor::from_rows({{-2.0, 3.0}})));
  EXPECT_EQ(y.value(), Tensor::from_rows({{2.0, 3.0}}));
}

TEST(Ops, SoftmaxOfZerosIsUniform) {
  Tape tape;
  Var y = softmax(tape.constant(Tensor::row({0, 0, 0})));
  for (double v : y.value().values()) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
}

TEST(Ops, MatmulRowByColumn) {
  Tape tape;
  Var y = matmul(tape.constant(Tensor::from_rows({{1, 2}})),
                 tape.constant(Tensor::from_rows({{3}, {4}})));
  EXPECT_DOUBLE_EQ(y.value().item(), 11.0);
}

TEST(Ops, ShapeMismatchNamesOpAndShapes) {
  Tape tape;
  Var a = tape.constant(Tensor({2, 3}));
  Var b = tape.constant(Tensor({2, 2}));
  try {
    matmul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("matmul"), std::string::npos);
    EXPECT_NE(msg.find("[2, 3]"), std::string::npos);
    EXPECT_NE(msg.find("[2, 2]"), std::string::npos);
  }
  EXPECT_THROW(add(a, b), ShapeError);
}

TEST(Ops, EmptyTensorRejected) {
  Tape tape;
  EXPECT_THROW(tape.leaf(Tensor()), ShapeError);
  EXPECT_THROW(tape.constant(Tensor({0, 3})), ShapeError);
}

TEST(Ops, SoftmaxRowsSumToOneAndSquashersStayInRange) {
  std::mt19937_64 rng(7);
  Tape tape;
  for (int trial = 0; trial < 100; ++trial) {
    Var x = tape.constant(random_tensor({4, 6}, rng, -30.0, 30.0));
    const Tensor s = softmax(x).value();
    for (std::size_t r = 0; r < 4; ++r) {
      double total = 0.0;
      for (std::size_t c = 0; c < 6; ++c) total += s.at(r, c);
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
    for (double v : sigmoid(x).value().values()) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
    for (double v : tanh(scale(x, 0.05)).value().values()) {
      EXPECT_GT(v, -1.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(Backward, PowerRule) {
  Tape tape;
  Var x = tape.leaf(Tensor::scalar(3.0));
  const Gradients g = tape.backward(square(x));
  EXPECT_DOUBLE_EQ(g[x].item(), 6.0);
}

TEST(Backward, AbsAtZeroUsesZeroSubgradient) {
  Tape tape;
  Var x = tape.leaf(Tensor::scalar(0.0));
  EXPECT_DOUBLE_EQ(tape.backward(sum(abs(x)))[x].item(), 0.0);
}

TEST(Backward, ReluAtZeroHasZeroDerivative) {
  Tape tape;
  Var x = tape.leaf(Tensor::scalar(0.0));
  EXPECT_DOUBLE_EQ(tape.backward(sum(relu(x)))[x].item(), 0.0);
}

TEST(Backward, UnreachableLeafGetsZeros) {
  Tape tape;
  Var x = tape.leaf(Tensor::scalar(2.0));
  Var unused = tape.leaf(Tensor({2, 2}, 1.0));
  const Gradients g = tape.backward(square(x));
  EXPECT_EQ(g[unused], Tensor({2, 2}));
  EXPECT_FALSE(g.reached(unused));
}

TEST(Backward, RejectsNonScalarAndDetachedLoss) {
  Tape tape;
  Var x = tape.leaf(Tensor({1, 2}, 1.0));
  EXPECT_THROW(tape.backward(relu(x)), Error);
  EXPECT_THROW(tape.backward(sum(detach(x))), Error);
  EXPECT_THROW(tape.backward(sum(tape.constant(Tensor({1, 2}, 1.0)))), Error);
}

TEST(Backward, StaleOrForeignVariablesRejected) {
  Tape tape;
  Tape other;
  Var x = tape.leaf(Tensor::scalar(1.0));
  Var y = other.leaf(Tensor::scalar(1.0));
  EXPECT_THROW(add(x, y), Error);
  EXPECT_THROW(other.backward(square(x)), Error);
  tape.clear();
  EXPECT_THROW(square(x), Error);
}

TEST(Backward, ClearingTapeIsolatesUpdates) {
  Tape tape;
  Var x = tape.leaf(Tensor::scalar(3.0));
  const double first = tape.backward(square(x))[x].item();
  tape.clear();
  Var x2 = tape.leaf(Tensor::scalar(3.0));
  const double second = tape.backward(square(x2))[x2].item();
  EXPECT_EQ(first, second);
}

TEST(GradCheck, SumIsExact) {
  std::mt19937_64 rng(1);
  const double err = grad_check([](Tape&, Var x) { return sum(x); }, random_tensor({3, 4}, rng));
  EXPECT_LT(err, 1e-10);
}

TEST(GradCheck, AbsAtZeroIsSkipped) {
  const LossFn f = [](Tape&, std::span<const Var> in) { return sum(abs(in[0])); };
  const GradCheckResult r = grad_check(f, {Tensor::row({0.0, 0.5})});
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_EQ(r.checked, 1u);
  EXPECT_LT(r.max_error, 1e-8);
}

TEST(GradCheck, ReluMatmulMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  const LossFn f = [](Tape&, std::span<const Var> in) { return sum(relu(matmul(in[0], in[1]))); };
  for (int trial = 0; trial < 20; ++trial) {
    const GradCheckResult r = grad_check(f, {random_tensor({5, 4}, rng), random_tensor({4, 3}, rng)});
    EXPECT_LT(r.max_error, 1e-4);
    EXPECT_GT(r.checked, 0u);
  }
}

// Every primitive against central differences on random inputs.
class PrimitiveGradTest : public ::testing::TestWithParam<int> {};

TEST_P(PrimitiveGradTest, RandomInputs) {
  std::mt19937_64 rng(1000 + GetParam());
  const Tensor a = random_tensor({3, 4}, rng);
  const Tensor b = random_tensor({3, 4}, rng);
  const Tensor row = random_tensor({1, 4}, rng);
  const Tensor col = random_tensor({3, 1}, rng);
  const Tensor one = random_tensor({1, 1}, rng);
  const Tensor w = random_tensor({4, 2}, rng);
  const Tensor batched = random_tensor({3, 8}, rng);
  const Tensor weights = random_tensor({3, 4}, rng);
  const Tensor h = random_tensor({3, 2}, rng);
  const Tensor w_x = random_tensor({4, 6}, rng);
  const Tensor w_h = random_tensor({2, 6}, rng);
  const Tensor b_gru = random_tensor({1, 6}, rng);
  const Tensor b_lin = random_tensor({1, 2}, rng);
  static const std::vector<std::size_t> idx{1, 3, 0};

  // Each loss is weighted by a fixed random tensor so gradients are not uniform.
  auto weighted = [weights](Tape& tape, Var y) {
    Tensor wt({y.rows(), y.cols()});
    for (std::size_t i = 0; i < wt.size(); ++i) wt[i] = weights[i % weights.size()] + 0.5;
    return sum(mul(y, tape.constant(wt)));
  };
  const std::vector<std::pair<const char*, LossFn>> cases = {
      {"matmul", [&](Tape& t, std::span<const Var> in) { return weighted(t, matmul(in[0], in[2])); }},
      {"add", [&](Tape& t, std::span<const Var> in) { return weighted(t, add(in[0], in[1])); }},
      {"add_row", [&](Tape& t, std::span<const Var> in) { return weighted(t, add(in[0], in[3])); }},
      {"sub_col", [&](Tape& t, std::span<const Var> in) { return weighted(t, sub(in[0], in[4])); }},
      {"mul", [&](Tape& t, std::span<const Var> in) { return weighted(t, mul(in[0], in[1])); }},
      {"mul_scalar", [&](Tape& t, std::span<const Var> in) { return weighted(t, mul(in[0], in[5])); }},
      {"mul_row", [&](Tape& t, std::span<const Var> in) { return weighted(t, mul(in[0], in[3])); }},
      {"scale", [&](Tape& t, std::span<const Var> in) { return weighted(t, scale(in[0], -2.5)); }},
      {"relu", [&](Tape& t, std::span<const Var> in) { return weighted(t, relu(in[0])); }},
      {"elu", [&](Tape& t, std::span<const Var> in) { return weighted(t, elu(in[0])); }},
      {"tanh", [&](Tape& t, std::span<const Var> in) { return weighted(t, tanh(in[0])); }},
      {"sigmoid", [&](Tape& t, std::span<const Var> in) { return weighted(t, sigmoid(in[0])); }},
      {"abs", [&](Tape& t, std::span<const Var> in) { return weighted(t, abs(in[0])); }},
      {"square", [&](Tape& t, std::span<const Var> in) { return weighted(t, square(in[0])); }},
      {"softmax", [&](Tape& t, std::span<const Var> in) { return weighted(t, softmax(in[0])); }},
      {"log_softmax", [&](Tape& t, std::span<const Var> in) { return weighted(t, log_softmax(in[0])); }},
      {"mean", [&](Tape&, std::span<const Var> in) { return mean(square(in[0])); }},
      {"sum_rows", [&](Tape& t, std::span<const Var> in) { return weighted(t, sum_rows(in[0])); }},
      {"row_max", [&](Tape& t, std::span<const Var> in) { return weighted(t, row_max(in[0])); }},
      {"gather", [&](Tape& t, std::span<const Var> in) { return weighted(t, gather(in[0], idx)); }},
      {"concat_cols", [&](Tape& t, std::span<const Var> in) {
         const Var parts[] = {in[0], in[4], in[1]};
         return weighted(t, concat_cols(parts));
       }},
      {"concat_rows", [&](Tape& t, std::span<const Var> in) {
         const Var parts[] = {in[0], in[3]};
         return weighted(t, concat_rows(parts));
       }},
      {"slice_cols", [&](Tape& t, std::span<const Var> in) { return weighted(t, slice_cols(in[0], 1, 2)); }},
      {"slice_rows", [&](Tape& t, std::span<const Var> in) { return weighted(t, slice_rows(in[0], 1, 2)); }},
      {"reshape", [&](Tape& t, std::span<const Var> in) { return weighted(t, reshape(in[0], {6, 2})); }},
      {"repeat_rows", [&](Tape& t, std::span<const Var> in) { return weighted(t, repeat_rows(in[0], 3)); }},
      {"batched_vecmat", [&](Tape& t, std::span<const Var> in) {
         return weighted(t, batched_vecmat(in[4], in[6], 8));
       }},
      {"batched_vecmat_wide", [&](Tape& t, std::span<const Var> in) {
         return weighted(t, batched_vecmat(in[0], in[6], 2));
       }},
      {"linear", [&](Tape& t, std::span<const Var> in) {
         return weighted(t, linear(in[0], in[2], in[11]));
       }},
      {"gru_cell", [&](Tape& t, std::span<const Var> in) {
         return weighted(t, gru_cell(in[0], in[7], in[8], in[9], in[10]));
       }},
  };
  const std::vector<Tensor> inputs{a, b, w, row, col, one, batched, h, w_x, w_h, b_gru, b_lin};
  for (const auto& [name, f] : cases) {
    const GradCheckResult r = grad_check(f, inputs);
    EXPECT_LT(r.max_error, 1e-4) << name;
    EXPECT_GT(r.checked, 0u) << name;
  }
}

INSTANTIATE_TEST_SUITE_P(Trials, PrimitiveGradTest, ::testing::Range(0, 100));

TEST(GruCell, ZeroParametersHalveHidden) {
  Tape tape;
  Var x = tape.constant(Tensor::from_rows({{0.3, -1.2, 2.0}}));
  Var h = tape.constant(Tensor::from_rows({{1.0, -4.0}}));
  Var out = gru_cell(x, h, tape.constant(Tensor({3, 6})), tape.constant(Tensor({2, 6})),
                     tape.constant(Tensor({1, 6})));
  EXPECT_DOUBLE_EQ(out.value()[0], 0.5);
  EXPECT_DOUBLE_EQ(out.value()[1], -2.0);
}

TEST(GruCell, OriginIsFixedPoint) {
  std::mt19937_64 rng(3);
  Tape tape;
  Var out = gru_cell(tape.constant(Tensor({2, 3})), tape.constant(Tensor({2, 4})),
                     tape.constant(random_tensor({3, 12}, rng)),
                     tape.constant(random_tensor({4, 12}, rng)), tape.constant(Tensor({1, 12})));
  for (double v : out.value().values()) EXPECT_EQ(v, 0.0);
}

TEST(GruCell, BackpropThroughTimeMatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  const std::size_t steps = 5;
  std::vector<Tensor> inputs{random_tensor({3, 6}, rng), random_tensor({2, 6}, rng),
                             random_tensor({1, 6}, rng), random_tensor({2, 2}, rng)};
  for (std::size_t t = 0; t < steps; ++t) inputs.push_back(random_tensor({2, 3}, rng));
  const LossFn f = [steps](Tape& tape, std::span<const Var> in) {
    Var h = in[3];
    for (std::size_t t = 0; t < steps; ++t) h = gru_cell(in[4 + t], h, in[0], in[1], in[2]);
    (void)tape;
    return sum(h);
  };
  const GradCheckResult r = grad_check(f, inputs);
  EXPECT_LT(r.max_error, 1e-4);
  EXPECT_EQ(r.skipped, 0u);
}

TEST(Determinism, IdenticalInputsGiveBitIdenticalGradients) {
  auto run = [] {
    std::mt19937_64 rng(5);
    Tape tape;
    Var w = tape.leaf(random_tensor({4, 3}, rng));
    Var x = tape.constant(random_tensor({2, 4}, rng));
    Var loss = sum(tanh(matmul(x, w)));
    return std::make_pair(loss.value(), tape.backward(loss)[w]);
  };
  EXPECT_EQ(run(), run());
}

TEST(Tensor, StorageIsCacheLineAligned) {
  for (std::size_t n : {1u, 3u, 7u, 64u}) {
    const Tensor t({n, 3}, 1.0);
    EXPECT_EQ(reinterpret_cast<std::uintptr_t>(t.data()) % 64, 0u);
    const Tensor r = t.reshaped({3, n});
    EXPECT_EQ(reinterpret_cast<std::uintptr_t>(r.data()) % 64, 0u);
    EXPECT_EQ(r.values()[0], 1.0);
  }
  EXPECT_THROW(Tensor({2, 2}).reshaped({3}), ShapeError);
}

}  // namespace
}  // namespace marl::ad
