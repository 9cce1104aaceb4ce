#pragma once

#include <string>

#include "marl/nets/params.h"

// Checkpoint format (JSON):
//   {"format": "marl-checkpoint", "version": 1,
//    "params": [{"name": ..., "shape": [...], "values": [...]}, ...]}
// Values are written in shortest round-trip form.
namespace marl::nets {

inline constexpr int kCheckpointVersion = 1;

std::string checkpoint_to_string(const ParamSet& params);
// Fills `params` from a checkpoint with the same names and shapes.
void checkpoint_from_string(const std::string& text, ParamSet& params);

void save_checkpoint(const std::string& path, const ParamSet& params);
void load_checkpoint(const std::string& path, ParamSet& params);

}  // namespace marl::nets
