#pragma once

// Frozen output of capacity_oracle (regenerate with `capacity_oracle`).
namespace marl::fixtures {

inline constexpr int kCapacityRestarts = 64;
inline constexpr int kCapacityIterations = 5000;

// Mean squared error over the nine joint actions of the non-monotonic game.
inline constexpr double kIsotonicFloorMse = 32.0;
inline constexpr double kRestartFloorMse = 32.000659901666737;

}  // namespace marl::fixtures
