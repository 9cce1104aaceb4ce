#include "marl/envs/env_config.h"

#include "marl/common/error.h"

namespace marl::envs {

std::vector<std::string> EnvConfig::validate() const {
  return kind == EnvKind::kMatrix ? matrix.validate() : predator_prey.validate();
}

std::string to_string(EnvKind kind) {
  return kind == EnvKind::kMatrix ? "matrix" : "predator_prey";
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "matrix") return EnvKind::kMatrix;
  if (name == "predator_prey") return EnvKind::kPredatorPrey;
  throw ConfigError({"env.kind must be \"matrix\" or \"predator_prey\", got \"" + name + "\""});
}

std::unique_ptr<Env> make_env(const EnvConfig& config) {
  if (config.kind == EnvKind::kMatrix) return std::make_unique<MatrixGame>(config.matrix);
  return std::make_unique<PredatorPrey>(config.predator_prey);
}

}  // namespace marl::envs
