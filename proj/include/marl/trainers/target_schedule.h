#pragma once

#include <cstdint>
#include <functional>

namespace marl::trainers {

// Target networks are copied whenever the episode counter reaches or passes
// a multiple of `interval`.
class TargetSchedule {
 public:
  explicit TargetSchedule(std::uint64_t interval) : interval_(interval) {}

  // True when (before, after] contains a multiple of the interval.
  bool due(std::uint64_t before, std::uint64_t after) const noexcept {
    return interval_ > 0 && after / interval_ > before / interval_;
  }
  std::uint64_t interval() const noexcept { return interval_; }

 private:
  std::uint64_t interval_;
};

// Called with the episode counter after every target copy.
using TargetCopyHook = std::function<void(std::uint64_t episodes)>;

}  // namespace marl::trainers
