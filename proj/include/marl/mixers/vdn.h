#pragma once

#include "marl/autodiff/tape.h"

namespace marl::mixers {

// Q_tot = sum_i Q_i. q [B,n] -> [B,1].
ad::Var vdn_mix(ad::Var q);

}  // namespace marl::mixers
