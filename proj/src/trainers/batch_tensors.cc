#include "marl/trainers/batch_tensors.h"

#include <algorithm>
#include <cmath>

#include "marl/common/error.h"

namespace marl::trainers {

Tensor batch_agent_inputs(const nets::AgentNetSpec& spec, const rollout::EpisodeBatch& batch,
                          std::size_t steps) {
  if (steps > batch.steps + 1) throw Error("batch_agent_inputs: too many steps");
  const std::size_t R = batch.agent_rows();
  const std::size_t obs_dim = batch.obs.cols();
  const std::span<const double> obs(batch.obs.data(), steps * R * obs_dim);
  std::vector<int> last(steps * R, -1);
  for (std::size_t t = 1; t < steps; ++t) {
    for (std::size_t r = 0; r < R; ++r) last[t * R + r] = batch.actions[(t - 1) * R + r];
  }
  return nets::agent_inputs(spec, obs, last);
}

Tensor batch_states(const rollout::EpisodeBatch& batch, std::size_t t0, std::size_t count) {
  return row_block(batch.states, t0 * batch.batch, count * batch.batch);
}

Tensor batch_obs(const rollout::EpisodeBatch& batch, std::size_t t0, std::size_t count) {
  const std::size_t R = batch.agent_rows();
  return row_block(batch.obs, t0 * R, count * R);
}

Tensor bt_to_column(const Tensor& bt) {
  const std::size_t B = bt.rows();
  const std::size_t T = bt.cols();
  Tensor out({T * B, 1});
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < T; ++t) out.data()[t * B + b] = bt.data()[b * T + t];
  }
  return out;
}

Tensor column_to_bt(const Tensor& column, std::size_t batch) {
  const std::size_t T = column.size() / batch;
  Tensor out({batch, T});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < T; ++t) out.data()[b * T + t] = column.data()[t * batch + b];
  }
  return out;
}

std::vector<std::size_t> batch_actions(const rollout::EpisodeBatch& batch) {
  return {batch.actions.begin(), batch.actions.end()};
}

Tensor row_block(const Tensor& t, std::size_t r0, std::size_t count) {
  const std::size_t c = t.cols();
  if (r0 + count > t.rows()) throw ShapeError("row_block: rows out of range");
  const double* begin = t.data() + r0 * c;
  return Tensor({count, c}, std::vector<double>(begin, begin + count * c));
}

std::vector<std::size_t> row_argmax(const Tensor& t) {
  const std::size_t c = t.cols();
  std::vector<std::size_t> out(t.rows());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const double* row = t.data() + r * c;
    out[r] = static_cast<std::size_t>(std::max_element(row, row + c) - row);
  }
  return out;
}

Tensor row_gather(const Tensor& t, const std::vector<std::size_t>& index) {
  Tensor out({t.rows(), 1});
  for (std::size_t r = 0; r < t.rows(); ++r) out.data()[r] = t.data()[r * t.cols() + index[r]];
  return out;
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor out = logits;
  const std::size_t c = out.cols();
  for (std::size_t r = 0; r < out.rows(); ++r) {
    double* row = out.data() + r * c;
    const double hi = *std::max_element(row, row + c);
    double total = 0.0;
    for (std::size_t a = 0; a < c; ++a) total += row[a] = std::exp(row[a] - hi);
    for (std::size_t a = 0; a < c; ++a) row[a] /= total;
  }
  return out;
}

}  // namespace marl::trainers
