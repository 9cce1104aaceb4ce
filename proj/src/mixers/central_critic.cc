#include "marl/mixers/central_critic.h"

#include "marl/autodiff/ops.h"
#include "marl/common/error.h"

namespace marl::mixers {

CentralCritic::CentralCritic(const CentralCriticSpec& spec, Rng& rng) : spec_(spec) {
  if (spec.n_agents == 0 || spec.state_dim == 0 || spec.embed == 0) {
    throw Error("central critic needs positive agent, state and embedding sizes");
  }
  l1_ = nets::Linear(params_, "fc1", spec.state_dim + spec.n_agents, spec.embed, rng);
  l2_ = nets::Linear(params_, "fc2", spec.embed, spec.embed, rng);
  l3_ = nets::Linear(params_, "fc3", spec.embed, 1, rng);
}

ad::Var CentralCritic::forward(const nets::Bound& p, ad::Var q, ad::Var s) const {
  if (q.cols() != spec_.n_agents || s.cols() != spec_.state_dim || q.rows() != s.rows()) {
    throw ShapeError("shape mismatch in central critic: " + ad::to_string(q.shape()) + " vs " +
                     ad::to_string(s.shape()));
  }
  const ad::Var parts[] = {s, q};
  ad::Var h = ad::relu(l1_(p, ad::concat_cols(parts)));
  h = ad::relu(l2_(p, h));
  return l3_(p, h);
}

}  // namespace marl::mixers
