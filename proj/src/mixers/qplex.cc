#include "marl/mixers/qplex.h"

#include "marl/autodiff/ops.h"
#include "marl/common/error.h"

namespace marl::mixers {

namespace {
// State-conditioned layers start with non-zero biases so a constant (or
// zero) state still yields non-zero hypernetwork outputs.
constexpr nets::BiasInit kStateBias = nets::BiasInit::kUniform;
}  // namespace

QplexMixer::QplexMixer(const QplexSpec& spec, Rng& rng) : spec_(spec) {
  if (spec.n_agents == 0 || spec.n_actions == 0 || spec.state_dim == 0 || spec.embed == 0) {
    throw Error("QPLEX needs positive agent, action, state and embedding sizes");
  }
  w_adv_ = nets::Linear(params_, "adv_weights", spec.state_dim, spec.n_agents, rng, kStateBias);
  b_adv_ = nets::Linear(params_, "adv_bias", spec.state_dim, 1, rng, kStateBias);
  value_ = nets::TwoLayer(params_, "value", spec.state_dim + spec.n_agents, spec.embed, 1,
                          rng, kStateBias);
}

ad::Var QplexMixer::advantage_mix(const nets::Bound& p, ad::Var a, ad::Var s) const {
  ad::Var w = w_adv_(p, s);
  if (spec_.constrain) w = ad::abs(w);
  return ad::add(ad::sum_rows(ad::mul(a, w)), b_adv_(p, s));
}

ad::Var QplexMixer::value_head(const nets::Bound& p, ad::Var v, ad::Var s) const {
  const ad::Var parts[] = {s, v};
  return value_(p, ad::concat_cols(parts));
}

QplexMixer::Output QplexMixer::forward(const nets::Bound& p, ad::Var q_all,
                                       std::span<const std::size_t> chosen, ad::Var s) const {
  const std::size_t batch = s.rows();
  const std::size_t n = spec_.n_agents;
  if (q_all.rows() != batch * n || q_all.cols() != spec_.n_actions ||
      s.cols() != spec_.state_dim) {
    throw ShapeError("shape mismatch in qplex: " + ad::to_string(q_all.shape()) + " vs " +
                     ad::to_string(s.shape()));
  }
  for (std::size_t u : chosen) {
    if (u >= spec_.n_actions) {
      throw Error("qplex: action index " + std::to_string(u) + " out of range for " +
                  std::to_string(spec_.n_actions) + " actions");
    }
  }
  ad::Var v = ad::row_max(q_all);
  ad::Var a = ad::sub(ad::gather(q_all, chosen), v);
  ad::Var a_tot = advantage_mix(p, ad::reshape(a, {batch, n}), s);
  ad::Var v_tot = value_head(p, ad::reshape(v, {batch, n}), s);
  return {ad::add(v_tot, a_tot), v_tot, a_tot};
}

ad::Var qplex_mix(const QplexMixer& mixer, const nets::Bound& p, ad::Var q_all,
                  std::span<const std::size_t> chosen, ad::Var s) {
  return mixer.forward(p, q_all, chosen, s).q_tot;
}

}  // namespace marl::mixers
