#include "marl/rollout/replay_buffer.h"

#include <numeric>
#include <vector>

#include "marl/common/error.h"

namespace marl::rollout {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error("replay buffer capacity must be positive");
}

void ReplayBuffer::insert(Episode episode) {
  if (episodes_.size() == capacity_) episodes_.pop_front();
  episodes_.push_back(std::move(episode));
  ++inserted_;
}

void ReplayBuffer::require(std::size_t count) const {
  if (count == 0) throw Error("replay buffer: batch size must be positive");
  if (count > episodes_.size()) {
    throw Error("replay buffer holds " + std::to_string(episodes_.size()) +
                " episodes, cannot provide " + std::to_string(count));
  }
}

EpisodeBatch ReplayBuffer::sample(std::size_t count, Rng& rng) const {
  require(count);
  std::vector<std::size_t> index(episodes_.size());
  std::iota(index.begin(), index.end(), std::size_t{0});
  std::vector<const Episode*> picked;
  picked.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t j = k + uniform_index(rng, index.size() - k);
    std::swap(index[k], index[j]);
    picked.push_back(&episodes_[index[k]]);
  }
  return make_batch(picked);
}

EpisodeBatch ReplayBuffer::latest(std::size_t count) const {
  require(count);
  std::vector<const Episode*> picked;
  for (std::size_t i = episodes_.size() - count; i < episodes_.size(); ++i) {
    picked.push_back(&episodes_[i]);
  }
  return make_batch(picked);
}

}  // namespace marl::rollout
