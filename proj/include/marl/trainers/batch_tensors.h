#pragma once

#include <cstddef>
#include <vector>

#include "marl/nets/agent_net.h"
#include "marl/rollout/episode.h"

// Views of an EpisodeBatch in the layouts the networks consume. "Column"
// tensors are time-major [T*B, 1]; the returns module works on [B,T].
namespace marl::trainers {

using ad::Tensor;



// Agent network inputs for steps [0, steps): [(steps)*B*n, input_dim].
Tensor batch_agent_inputs(const nets::AgentNetSpec& spec, const rollout::EpisodeBatch& batch,
                          std::size_t steps);

// States of steps [t0, t0 + count): [count*B, state_dim].
Tensor batch_states(const rollout::EpisodeBatch& batch, std::size_t t0, std::size_t count);
// Observations of steps [t0, t0 + count): [count*B*n, obs_dim].
Tensor batch_obs(const rollout::EpisodeBatch& batch, std::size_t t0, std::size_t count);

Tensor bt_to_column(const Tensor& bt);
Tensor column_to_bt(const Tensor& column, std::size_t batch);

// Taken actions of steps [0, T) as gather indices.
std::vector<std::size_t> batch_actions(const rollout::EpisodeBatch& batch);

// Rows [r0, r0 + count) of a tensor.
Tensor row_block(const Tensor& t, std::size_t r0, std::size_t count);

// Per-row argmax (ties to the lowest index) and the matching values.
std::vector<std::size_t> row_argmax(const Tensor& t);
Tensor row_gather(const Tensor& t, const std::vector<std::size_t>& index);

// Row-wise softmax of logits.
Tensor softmax_rows(const Tensor& logits);

}  // namespace marl::trainers
