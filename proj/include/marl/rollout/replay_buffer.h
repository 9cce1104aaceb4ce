#pragma once

#include <cstdint>
#include <deque>

#include "marl/common/rng.h"
#include "marl/rollout/episode.h"

namespace marl::rollout {

// FIFO store of whole episodes.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void insert(Episode episode);

  // `count` distinct episodes chosen uniformly at random.
  EpisodeBatch sample(std::size_t count, Rng& rng) const;
  // The `count` most recently inserted episodes, oldest first.
  EpisodeBatch latest(std::size_t count) const;

  std::size_t size() const noexcept { return episodes_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::uint64_t inserted() const noexcept { return inserted_; }
  // Oldest first.
  const Episode& operator[](std::size_t i) const { return episodes_[i]; }

 private:
  void require(std::size_t count) const;

  std::size_t capacity_;
  std::uint64_t inserted_ = 0;
  std::deque<Episode> episodes_;
};

}  // namespace marl::rollout
