#include "marl/rollout/select.h"

#include <cmath>

#include "marl/common/error.h"

namespace marl::rollout {

int argmax_row(const ad::Tensor& values, std::size_t r) {
  const std::size_t n = values.cols();
  const double* row = values.data() + r * n;
  std::size_t best = 0;
  for (std::size_t a = 1; a < n; ++a) {
    if (row[a] > row[best]) best = a;
  }
  return static_cast<int>(best);
}

namespace {

int sample_row(const ad::Tensor& probs, std::size_t r, Rng& rng) {
  const std::size_t n = probs.cols();
  const double* row = probs.data() + r * n;
  double total = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (!(row[a] >= 0.0)) throw Error("select_actions: negative probability in row " +
                                      std::to_string(r));
    total += row[a];
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw Error("select_actions: row " + std::to_string(r) + " sums to " +
                std::to_string(total) + ", not 1");
  }
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    acc += row[a];
    if (u < acc) return static_cast<int>(a);
  }
  // Rounding left u past the last boundary: take the last positive entry.
  for (std::size_t a = n; a-- > 0;) {
    if (row[a] > 0.0) return static_cast<int>(a);
  }
  return 0;
}

}  // namespace

std::vector<int> select_actions(const ad::Tensor& values, double epsilon, SelectMode mode,
                                Rng& rng) {
  const std::size_t agents = values.rows();
  const std::size_t n = values.cols();
  std::vector<int> actions(agents);
  for (std::size_t i = 0; i < agents; ++i) {
    if (mode == SelectMode::kSample) {
      actions[i] = sample_row(values, i, rng);
    } else if (epsilon > 0.0 && uniform01(rng) < epsilon) {
      actions[i] = static_cast<int>(uniform_index(rng, n));
    } else {
      actions[i] = argmax_row(values, i);
    }
  }
  return actions;
}

}  // namespace marl::rollout
