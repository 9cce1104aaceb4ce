#include "marl/mixers/lica_critic.h"

#include <cmath>

#include "marl/autodiff/ops.h"
#include "marl/common/error.h"

namespace marl::mixers {

namespace {
// State-conditioned layers start with non-zero biases so a constant (or
// zero) state still yields non-zero hypernetwork outputs.
constexpr nets::BiasInit kStateBias = nets::BiasInit::kUniform;
}  // namespace

LicaCritic::LicaCritic(const LicaCriticSpec& spec, Rng& rng) : spec_(spec) {
  if (spec.n_agents == 0 || spec.n_actions == 0 || spec.state_dim == 0 || spec.embed == 0) {
    throw Error("LICA critic needs positive agent, action, state and embedding sizes");
  }
  const std::size_t in = spec.n_agents * spec.n_actions;
  hyper_w1_ = nets::Linear(params_, "hyper_w1", spec.state_dim, in * spec.embed, rng, kStateBias);
  hyper_b1_ = nets::Linear(params_, "hyper_b1", spec.state_dim, spec.embed, rng, kStateBias);
  hyper_w2_ = nets::Linear(params_, "hyper_w2", spec.state_dim, spec.embed, rng, kStateBias);
  hyper_b2_ = nets::TwoLayer(params_, "hyper_b2", spec.state_dim, spec.embed, 1, rng, kStateBias);
}

ad::Var LicaCritic::forward(const nets::Bound& p, ad::Var policies, ad::Var s) const {
  const std::size_t width = spec_.n_agents * spec_.n_actions;
  if (policies.cols() != width || s.cols() != spec_.state_dim || policies.rows() != s.rows()) {
    throw ShapeError("shape mismatch in lica critic: " + ad::to_string(policies.shape()) +
                     " vs " + ad::to_string(s.shape()));
  }
  const ad::Tensor& pi = policies.value();
  for (std::size_t r = 0; r < pi.rows(); ++r) {
    for (std::size_t i = 0; i < spec_.n_agents; ++i) {
      double total = 0.0;
      for (std::size_t a = 0; a < spec_.n_actions; ++a) {
        const double v = pi.at(r, i * spec_.n_actions + a);
        if (v < 0.0) throw Error("lica critic: negative policy probability");
        total += v;
      }
      if (std::fabs(total - 1.0) > 1e-9) {
        throw Error("lica critic: policy of agent " + std::to_string(i) + " sums to " +
                    std::to_string(total));
      }
    }
  }
  ad::Var hidden = ad::relu(
      ad::add(ad::batched_vecmat(policies, hyper_w1_(p, s), spec_.embed), hyper_b1_(p, s)));
  return ad::add(ad::sum_rows(ad::mul(hidden, hyper_w2_(p, s))), hyper_b2_(p, s));
}

ad::Var lica_critic_eval(const LicaCritic& critic, const nets::Bound& p, ad::Var policies,
                         ad::Var s) {
  return critic.forward(p, policies, s);
}

}  // namespace marl::mixers
