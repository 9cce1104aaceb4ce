#pragma once

#include <cstdint>
#include <vector>

#include "marl/nets/params.h"

namespace marl::nets {

enum class OptimizerKind { kAdam, kRmsProp };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdam;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double rho = 0.99;
  double rms_eps = 1e-5;
  double clip_norm = 10.0;  // <= 0 disables clipping
};

// Scales `grads` so their joint L2 norm is at most max_norm. Returns the
// norm before scaling.
double clip_global_norm(std::vector<Tensor>& grads, double max_norm);

class Optimizer {
 public:
  Optimizer(const OptimizerConfig& config, const ParamSet& layout);

  // Clips (if configured) and applies one update. Returns the unclipped norm.
  double step(ParamSet& params, std::vector<Tensor> grads);

  const OptimizerConfig& config() const noexcept { return config_; }
  std::uint64_t steps() const noexcept { return steps_; }
  const std::vector<Tensor>& first_moment() const noexcept { return m_; }
  const std::vector<Tensor>& second_moment() const noexcept { return v_; }

 private:
  OptimizerConfig config_;
  std::uint64_t steps_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace marl::nets
