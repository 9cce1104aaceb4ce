#pragma once

namespace marl::mixers {

// Optimistic weighting: 1 when the sample is underestimated (q_tot < y),
// alpha otherwise. alpha must lie in (0, 1].
double owqmix_weight(double q_tot, double y, double alpha);

}  // namespace marl::mixers
