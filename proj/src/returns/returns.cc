#include "marl/returns/returns.h"

#include <string>

#include "marl/common/error.h"

namespace marl::returns {
namespace {

void check_range(double lambda, double gamma) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw Error("gamma must lie in [0, 1), got " + std::to_string(gamma));
  }
}

// Number of valid leading steps in row b; rejects holes in the mask.
std::size_t valid_length(const Tensor& mask, std::size_t b) {
  const std::size_t steps = mask.cols();
  std::size_t len = 0;
  while (len < steps && mask.at(b, len) != 0.0) ++len;
  for (std::size_t t = len; t < steps; ++t) {
    if (mask.at(b, t) != 0.0) throw Error("mask row " + std::to_string(b) + " is not a prefix");
  }
  return len;
}

void check_shapes(const Tensor& r, const Tensor& a, const Tensor& terminated, const Tensor& mask) {
  if (r.rows() != a.rows() || r.cols() != a.cols() || r.rows() != terminated.rows() ||
      r.cols() != terminated.cols() || r.rows() != mask.rows() || r.cols() != mask.cols()) {
    throw ShapeError("length mismatch in targets: rewards " + ad::to_string(r.shape()) +
                     ", bootstrap " + ad::to_string(a.shape()) + ", terminated " +
                     ad::to_string(terminated.shape()) + ", mask " + ad::to_string(mask.shape()));
  }
}

}  // namespace

void TargetSpec::validate() const { check_range(lambda, gamma); }

Tensor one_step_targets(const Tensor& r, const Tensor& bootstrap, const Tensor& terminated,
                        const Tensor& mask, double gamma) {
  check_shapes(r, bootstrap, terminated, mask);
  check_range(0.0, gamma);
  Tensor y({r.rows(), r.cols()});
  for (std::size_t b = 0; b < r.rows(); ++b) {
    const std::size_t len = valid_length(mask, b);
    for (std::size_t t = 0; t < len; ++t) {
      const double cont = 1.0 - terminated.at(b, t);
      y.at(b, t) = r.at(b, t) + (cont != 0.0 ? gamma * cont * bootstrap.at(b, t) : 0.0);
    }
  }
  return y;
}

Tensor lambda_targets(const Tensor& r, const Tensor& next, const Tensor& terminated,
                      const Tensor& mask, double lambda, double gamma) {
  check_shapes(r, next, terminated, mask);
  check_range(lambda, gamma);
  Tensor g({r.rows(), r.cols()});
  for (std::size_t b = 0; b < r.rows(); ++b) {
    const std::size_t len = valid_length(mask, b);
    double later = 0.0;
    for (std::size_t t = len; t-- > 0;) {
      const double cont = 1.0 - terminated.at(b, t);
      double value = r.at(b, t);
      if (cont != 0.0) {
        const double tail = t + 1 == len ? next.at(b, t) : later;
        value += gamma * cont * ((1.0 - lambda) * next.at(b, t) + lambda * tail);
      }
      g.at(b, t) = value;
      later = value;
    }
  }
  return g;
}

Tensor peng_q_lambda_targets(const Tensor& r, const Tensor& max_q_next, const Tensor& terminated,
                             const Tensor& mask, double lambda, double gamma) {
  return lambda_targets(r, max_q_next, terminated, mask, lambda, gamma);
}

Tensor td_lambda_targets(const Tensor& r, const Tensor& v_next, const Tensor& terminated,
                         const Tensor& mask, double lambda, double gamma) {
  return lambda_targets(r, v_next, terminated, mask, lambda, gamma);
}

Tensor targets(const TargetSpec& spec, const Tensor& r, const Tensor& next,
               const Tensor& terminated, const Tensor& mask) {
  spec.validate();
  switch (spec.kind) {
    case TargetKind::kOneStep: return one_step_targets(r, next, terminated, mask, spec.gamma);
    case TargetKind::kTdLambda: return td_lambda_targets(r, next, terminated, mask, spec.lambda, spec.gamma);
    case TargetKind::kPengQLambda:
      return peng_q_lambda_targets(r, next, terminated, mask, spec.lambda, spec.gamma);
  }
  return {};
}

}  // namespace marl::returns
