#include "marl/mixers/qatten.h"

#include "marl/autodiff/ops.h"
#include "marl/common/error.h"

namespace marl::mixers {

namespace {
// State-conditioned layers start with non-zero biases so a constant (or
// zero) state still yields non-zero hypernetwork outputs.
constexpr nets::BiasInit kStateBias = nets::BiasInit::kUniform;
}  // namespace

QattenMixer::QattenMixer(const QattenSpec& spec, Rng& rng) : spec_(spec) {
  if (spec.heads < 1) throw Error("Qatten needs at least one attention head");
  if (spec.n_agents == 0 || spec.state_dim == 0 || spec.agent_dim == 0 || spec.embed == 0) {
    throw Error("Qatten needs positive agent, state, feature and embedding sizes");
  }
  e_s_ = nets::Linear(params_, "embed_state", spec.state_dim, spec.embed, rng, kStateBias);
  e_i_ = nets::Linear(params_, "embed_agent", spec.agent_dim, spec.embed, rng);
  for (std::size_t h = 0; h < spec.heads; ++h) {
    const std::string tag = std::to_string(h);
    w_q_.push_back(params_.add("query." + tag,
                               nets::uniform_init({spec.embed, spec.embed}, spec.embed, rng)));
    w_k_.push_back(params_.add("key." + tag,
                               nets::uniform_init({spec.embed, spec.embed}, spec.embed, rng)));
  }
  w_head_ = nets::Linear(params_, "head_weights", spec.state_dim, spec.heads, rng, kStateBias);
  c_ = nets::TwoLayer(params_, "constant", spec.state_dim, spec.embed, 1, rng, kStateBias);
}

ad::Var QattenMixer::attention_from(const nets::Bound& p, std::size_t head, ad::Var e_s,
                                    ad::Var e_i) const {
  const std::size_t batch = e_s.rows();
  ad::Var query = ad::matmul(e_s, p[w_q_[head]]);                    // [B,E]
  ad::Var keys = ad::matmul(e_i, p[w_k_[head]]);                     // [B*n,E]
  ad::Var logits = ad::sum_rows(ad::mul(ad::repeat_rows(query, spec_.n_agents), keys));
  return ad::softmax(ad::reshape(logits, {batch, spec_.n_agents}));  // [B,n]
}

ad::Var QattenMixer::attention(const nets::Bound& p, std::size_t head, ad::Var s,
                               ad::Var agent_features) const {
  return attention_from(p, head, e_s_(p, s), e_i_(p, agent_features));
}

ad::Var QattenMixer::forward(const nets::Bound& p, ad::Var q, ad::Var s,
                             ad::Var agent_features) const {
  const std::size_t batch = q.rows();
  if (q.cols() != spec_.n_agents || s.rows() != batch || s.cols() != spec_.state_dim ||
      agent_features.rows() != batch * spec_.n_agents || agent_features.cols() != spec_.agent_dim) {
    throw ShapeError("shape mismatch in qatten: " + ad::to_string(q.shape()) + " vs " +
                     ad::to_string(s.shape()) + " and " + ad::to_string(agent_features.shape()));
  }
  ad::Var e_s = e_s_(p, s);
  ad::Var e_i = e_i_(p, agent_features);
  ad::Var weights = w_head_(p, s);  // [B,H]
  if (spec_.constrain) weights = ad::abs(weights);
  std::vector<ad::Var> heads;
  for (std::size_t h = 0; h < spec_.heads; ++h) {
    heads.push_back(ad::sum_rows(ad::mul(attention_from(p, h, e_s, e_i), q)));  // [B,1]
  }
  ad::Var per_head = spec_.heads == 1 ? heads[0] : ad::concat_cols(heads);  // [B,H]
  return ad::add(ad::sum_rows(ad::mul(per_head, weights)), c_(p, s));
}

ad::Var qatten_mix(const QattenMixer& mixer, const nets::Bound& p, ad::Var q, ad::Var s,
                   ad::Var agent_features) {
  return mixer.forward(p, q, s, agent_features);
}

}  // namespace marl::mixers
