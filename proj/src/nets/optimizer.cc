#include "marl/nets/optimizer.h"

#include <cmath>

#include "marl/common/error.h"

namespace marl::nets {

double clip_global_norm(std::vector<Tensor>& grads, double max_norm) {
  const double norm = global_norm(grads);
  if (max_norm > 0.0 && norm > max_norm) {
    const double factor = max_norm / norm;
    for (Tensor& g : grads) {
      for (double& v : g.values()) v *= factor;
    }
  }
  return norm;
}

Optimizer::Optimizer(const OptimizerConfig& config, const ParamSet& layout) : config_(config) {
  for (std::size_t i = 0; i < layout.size(); ++i) {
    m_.emplace_back(layout[i].shape());
    v_.emplace_back(layout[i].shape());
  }
}

double Optimizer::step(ParamSet& params, std::vector<Tensor> grads) {
  if (grads.size() != params.size() || params.size() != v_.size()) {
    throw ShapeError("optimizer step: parameter and gradient lists differ");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (grads[k].shape() != params[k].shape() || params[k].shape() != v_[k].shape()) {
      throw ShapeError("optimizer step: shape mismatch for '" + params.name(k) + "'");
    }
  }
  const double norm = clip_global_norm(grads, config_.clip_norm);
  ++steps_;
  const double lr = config_.lr;
  if (config_.kind == OptimizerKind::kAdam) {
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      double* theta = params[k].data();
      double* m = m_[k].data();
      double* v = v_[k].data();
      const double* g = grads[k].data();
      for (std::size_t i = 0; i < params[k].size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * g[i];
        v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
        theta[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.adam_eps);
      }
    }
  } else {
    const double rho = config_.rho;
    for (std::size_t k = 0; k < params.size(); ++k) {
      double* theta = params[k].data();
      double* v = v_[k].data();
      const double* g = grads[k].data();
      for (std::size_t i = 0; i < params[k].size(); ++i) {
        v[i] = rho * v[i] + (1.0 - rho) * g[i] * g[i];
        theta[i] -= lr * g[i] / (std::sqrt(v[i]) + config_.rms_eps);
      }
    }
  }
  return norm;
}

}  // namespace marl::nets
