#pragma once

#include <memory>
#include <string>
#include <vector>

#include "marl/envs/matrix_game.h"
#include "marl/envs/predator_prey.h"

namespace marl::envs {

enum class EnvKind { kMatrix, kPredatorPrey };

struct EnvConfig {
  EnvKind kind = EnvKind::kMatrix;
  MatrixGameSpec matrix;
  PredatorPreySpec predator_prey;

  std::vector<std::string> validate() const;

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

std::unique_ptr<Env> make_env(const EnvConfig& config);

}  // namespace marl::envs
