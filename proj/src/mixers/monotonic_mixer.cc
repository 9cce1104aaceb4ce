#include "marl/mixers/monotonic_mixer.h"

#include "marl/autodiff/ops.h"
#include "marl/common/error.h"

namespace marl::mixers {

namespace {
// State-conditioned layers start with non-zero biases so a constant (or
// zero) state still yields non-zero hypernetwork outputs.
constexpr nets::BiasInit kStateBias = nets::BiasInit::kUniform;
}  // namespace

MonotonicMixer::MonotonicMixer(const MonotonicMixerSpec& spec, Rng& rng) : spec_(spec) {
  if (spec.n_agents == 0 || spec.state_dim == 0 || spec.embed == 0) {
    throw Error("monotonic mixer needs positive agent, state and embedding sizes");
  }
  hyper_w1_ = nets::Linear(params_, "hyper_w1", spec.state_dim, spec.n_agents * spec.embed,
                           rng, kStateBias);
  hyper_b1_ = nets::Linear(params_, "hyper_b1", spec.state_dim, spec.embed, rng, kStateBias);
  hyper_w2_ = nets::Linear(params_, "hyper_w2", spec.state_dim, spec.embed, rng, kStateBias);
  hyper_b2_ = nets::TwoLayer(params_, "hyper_b2", spec.state_dim, spec.embed, 1, rng, kStateBias);
}

ad::Var MonotonicMixer::forward(const nets::Bound& p, ad::Var x, ad::Var s) const {
  if (x.cols() != spec_.n_agents || s.cols() != spec_.state_dim || x.rows() != s.rows()) {
    throw ShapeError("shape mismatch in mixer: " + ad::to_string(x.shape()) + " vs " +
                     ad::to_string(s.shape()));
  }
  ad::Var w1 = hyper_w1_(p, s);
  ad::Var w2 = hyper_w2_(p, s);
  if (spec_.constrain) {
    w1 = ad::abs(w1);
    w2 = ad::abs(w2);
  }
  ad::Var hidden = ad::elu(ad::add(ad::batched_vecmat(x, w1, spec_.embed), hyper_b1_(p, s)));
  return ad::add(ad::sum_rows(ad::mul(hidden, w2)), hyper_b2_(p, s));
}

ad::Var qmix_mix(const MonotonicMixer& mixer, const nets::Bound& p, ad::Var q, ad::Var s) {
  return mixer.forward(p, q, s);
}

ad::Var value_mix(const MonotonicMixer& mixer, const nets::Bound& p, ad::Var v, ad::Var s) {
  return mixer.forward(p, v, s);
}

}  // namespace marl::mixers
