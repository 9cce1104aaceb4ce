#include "marl/mixers/owqmix.h"

#include <string>

#include "marl/common/error.h"

namespace marl::mixers {

double owqmix_weight(double q_tot, double y, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error("owqmix alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  return q_tot < y ? 1.0 : alpha;
}

}  // namespace marl::mixers
