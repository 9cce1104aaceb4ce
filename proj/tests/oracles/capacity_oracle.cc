// Lower bounds on how well a monotonic mixer can fit the 3x3 non-monotonic
// payoff, computed without the library.
//
//   isotonic floor  min over row/column orderings of the 2D isotonic
//                   regression (rows and columns non-decreasing), Dykstra
//                   alternating projections with PAVA
//   restart floor   best of 64 restarts of full-batch Adam on the
//                   |W|-constrained QMIX function class with state [0],
//                   written out with hand-derived gradients
//
// Usage: capacity_oracle            print both values
//        capacity_oracle --check    compare with the frozen fixture

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <random>
#include <vector>

#include "capacity_floor.h"

namespace {

constexpr int kA = 3;
using Grid = std::array<std::array<double, kA>, kA>;

const Grid kPayoff = {{{12, -12, -12}, {-12, 0, 0}, {-12, 0, 0}}};

// Pool-adjacent-violators: least-squares non-decreasing fit, unit weights.
std::array<double, kA> pava(std::array<double, kA> y) {
  std::vector<double> mean;
  std::vector<int> count;
  for (double v : y) {
    mean.push_back(v);
    count.push_back(1);
    while (mean.size() > 1 && mean[mean.size() - 2] > mean.back()) {
      const double m = (mean[mean.size() - 2] * count[count.size() - 2] +
                        mean.back() * count.back()) /
                       (count[count.size() - 2] + count.back());
      const int c = count[count.size() - 2] + count.back();
      mean.pop_back();
      count.pop_back();
      mean.back() = m;
      count.back() = c;
    }
  }
  std::array<double, kA> out{};
  int k = 0;
  for (std::size_t b = 0; b < mean.size(); ++b) {
    for (int i = 0; i < count[b]; ++i) out[k++] = mean[b];
  }
  return out;
}

Grid project_rows(const Grid& g) {
  Grid out;
  for (int r = 0; r < kA; ++r) out[r] = pava(g[r]);
  return out;
}

Grid project_cols(const Grid& g) {
  Grid out;
  for (int c = 0; c < kA; ++c) {
    std::array<double, kA> col;
    for (int r = 0; r < kA; ++r) col[r] = g[r][c];
    col = pava(col);
    for (int r = 0; r < kA; ++r) out[r][c] = col[r];
  }
  return out;
}

// Dykstra's algorithm for the projection onto the intersection of the two
// monotone cones.
Grid isotonic_2d(const Grid& y) {
  Grid x = y;
  Grid p{}, q{};
  for (int it = 0; it < 100000; ++it) {
    Grid a;
    for (int r = 0; r < kA; ++r)
      for (int c = 0; c < kA; ++c) a[r][c] = x[r][c] + p[r][c];
    const Grid z = project_rows(a);
    for (int r = 0; r < kA; ++r)
      for (int c = 0; c < kA; ++c) p[r][c] = a[r][c] - z[r][c];
    Grid b;
    for (int r = 0; r < kA; ++r)
      for (int c = 0; c < kA; ++c) b[r][c] = z[r][c] + q[r][c];
    const Grid next = project_cols(b);
    for (int r = 0; r < kA; ++r)
      for (int c = 0; c < kA; ++c) q[r][c] = b[r][c] - next[r][c];
    double change = 0.0;
    for (int r = 0; r < kA; ++r)
      for (int c = 0; c < kA; ++c) change = std::max(change, std::abs(next[r][c] - x[r][c]));
    x = next;
    if (change < 1e-15 && it > 10) break;
  }
  return x;
}

double isotonic_floor() {
  std::array<int, kA> rows{0, 1, 2};
  double best = INFINITY;
  do {
    std::array<int, kA> cols{0, 1, 2};
    do {
      Grid y;
      for (int r = 0; r < kA; ++r)
        for (int c = 0; c < kA; ++c) y[r][c] = kPayoff[rows[r]][cols[c]];
      const Grid fit = isotonic_2d(y);
      double sse = 0.0;
      for (int r = 0; r < kA; ++r)
        for (int c = 0; c < kA; ++c) sse += (fit[r][c] - y[r][c]) * (fit[r][c] - y[r][c]);
      best = std::min(best, sse / (kA * kA));
    } while (std::next_permutation(cols.begin(), cols.end()));
  } while (std::next_permutation(rows.begin(), rows.end()));
  return best;
}

// f(u1,u2) = sum_k |v_k| elu(|w_k1| x_u1 + |w_k2| y_u2 + b_k) + c
struct Model {
  static constexpr int kE = 32;
  std::array<double, kA> x{}, y{};
  std::array<double, kE> w1{}, w2{}, b{}, v{};
  double c = 0.0;

  static constexpr int kSize = 2 * kA + 4 * kE + 1;
  double* flat() { return x.data(); }
};
static_assert(sizeof(Model) == Model::kSize * sizeof(double));

double elu(double h) { return h > 0 ? h : std::expm1(h); }
double elu_grad(double h) { return h > 0 ? 1.0 : std::exp(h); }
double sgn(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

double loss_and_grad(const Model& m, Model& g) {
  g = Model{};
  double loss = 0.0;
  for (int u1 = 0; u1 < kA; ++u1) {
    for (int u2 = 0; u2 < kA; ++u2) {
      std::array<double, Model::kE> h;
      double f = m.c;
      for (int k = 0; k < Model::kE; ++k) {
        h[k] = std::abs(m.w1[k]) * m.x[u1] + std::abs(m.w2[k]) * m.y[u2] + m.b[k];
        f += std::abs(m.v[k]) * elu(h[k]);
      }
      const double e = f - kPayoff[u1][u2];
      loss += e * e / (kA * kA);
      const double df = 2.0 * e / (kA * kA);
      g.c += df;
      for (int k = 0; k < Model::kE; ++k) {
        g.v[k] += df * elu(h[k]) * sgn(m.v[k]);
        const double dh = df * std::abs(m.v[k]) * elu_grad(h[k]);
        g.b[k] += dh;
        g.w1[k] += dh * m.x[u1] * sgn(m.w1[k]);
        g.w2[k] += dh * m.y[u2] * sgn(m.w2[k]);
        g.x[u1] += dh * std::abs(m.w1[k]);
        g.y[u2] += dh * std::abs(m.w2[k]);
      }
    }
  }
  return loss;
}

double fit_once(std::mt19937_64& rng, int iterations) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Model m;
  double* p = m.flat();
  for (int i = 0; i < Model::kSize; ++i) p[i] = u(rng);
  std::vector<double> mom(Model::kSize, 0.0), vel(Model::kSize, 0.0);
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  Model g;
  double loss = 0.0;
  double best = INFINITY;
  for (int t = 1; t <= iterations + 1; ++t) {
    loss = loss_and_grad(m, g);
    best = std::min(best, loss);
    if (t > iterations) break;
    const double* gp = g.flat();
    for (int i = 0; i < Model::kSize; ++i) {
      mom[i] = b1 * mom[i] + (1 - b1) * gp[i];
      vel[i] = b2 * vel[i] + (1 - b2) * gp[i] * gp[i];
      const double mh = mom[i] / (1 - std::pow(b1, t));
      const double vh = vel[i] / (1 - std::pow(b2, t));
      p[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
  }
  return best;
}

double restart_floor(int restarts, int iterations) {
  std::mt19937_64 rng(20240601);
  double best = INFINITY;
  for (int r = 0; r < restarts; ++r) best = std::min(best, fit_once(rng, iterations));
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const bool check = argc > 1 && std::strcmp(argv[1], "--check") == 0;
  const double iso = isotonic_floor();
  const double restart = restart_floor(marl::fixtures::kCapacityRestarts,
                                       marl::fixtures::kCapacityIterations);
  std::printf("isotonic_floor %.17g\nrestart_floor %.17g\n", iso, restart);
  if (!check) return 0;
  bool ok = true;
  auto expect = [&](const char* what, bool cond) {
    std::printf("%s %s\n", cond ? "ok  " : "FAIL", what);
    ok = ok && cond;
  };
  expect("isotonic floor matches fixture",
         std::abs(iso - marl::fixtures::kIsotonicFloorMse) <= 1e-9);
  expect("restart floor matches fixture",
         std::abs(restart - marl::fixtures::kRestartFloorMse) <= 1e-6);
  expect("restart floor not below the isotonic bound", restart >= iso - 1e-9);
  return ok ? 0 : 1;
}
