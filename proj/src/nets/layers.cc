#include "marl/nets/layers.h"

#include <cmath>

#include "marl/autodiff/ops.h"
#include "marl/common/error.h"

namespace marl::nets {

Tensor uniform_init(ad::Shape shape, std::size_t fan_in, Rng& rng) {
  if (fan_in == 0) throw Error("parameter initialization with zero fan-in");
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = (2.0 * uniform01(rng) - 1.0) * bound;
  return t;
}

Linear::Linear(ParamSet& params, const std::string& name, std::size_t in, std::size_t out,
               Rng& rng, BiasInit bias)
    : in_(in), out_(out) {
  if (out == 0) throw Error("linear layer '" + name + "' has zero outputs");
  w_ = params.add(name + ".w", uniform_init({in, out}, in, rng));
  b_ = params.add(name + ".b", bias == BiasInit::kUniform ? uniform_init({1, out}, in, rng)
                                                          : Tensor({1, out}));
}

ad::Var Linear::operator()(const Bound& p, ad::Var x) const {
  return ad::linear(x, p[w_], p[b_]);
}

TwoLayer::TwoLayer(ParamSet& params, const std::string& name, std::size_t in,
                   std::size_t hidden, std::size_t out, Rng& rng, BiasInit bias)
    : first_(params, name + ".0", in, hidden, rng, bias),
      second_(params, name + ".1", hidden, out, rng, bias) {}

ad::Var TwoLayer::operator()(const Bound& p, ad::Var x) const {
  return second_(p, ad::relu(first_(p, x)));
}

Gru::Gru(ParamSet& params, const std::string& name, std::size_t in, std::size_t hidden, Rng& rng)
    : in_(in), hidden_(hidden) {
  if (hidden == 0) throw Error("GRU '" + name + "' has zero hidden units");
  w_x_ = params.add(name + ".w_x", uniform_init({in, 3 * hidden}, in, rng));
  w_h_ = params.add(name + ".w_h", uniform_init({hidden, 3 * hidden}, hidden, rng));
  b_ = params.add(name + ".b", Tensor({1, 3 * hidden}));
}

ad::Var Gru::operator()(const Bound& p, ad::Var x, ad::Var h) const {
  return ad::gru_cell(x, h, p[w_x_], p[w_h_], p[b_]);
}

}  // namespace marl::nets
