#include "marl/trainers/learner.h"

#include "marl/common/error.h"

namespace marl::trainers {

void ParamGroup::add(nets::ParamSet& params, nets::OptimizerConfig config) {
  config.clip_norm = 0.0;
  sets_.push_back(&params);
  optimizers_.emplace_back(config, params);
}

double ParamGroup::step(std::vector<std::vector<Tensor>> grads) {
  if (grads.size() != sets_.size()) throw Error("ParamGroup: gradient list mismatch");
  std::vector<Tensor> flat;
  for (auto& g : grads) {
    for (auto& t : g) flat.push_back(std::move(t));
  }
  const double norm = nets::clip_global_norm(flat, clip_norm_);
  std::size_t k = 0;
  for (std::size_t s = 0; s < sets_.size(); ++s) {
    std::vector<Tensor> part;
    for (std::size_t i = 0; i < sets_[s]->size(); ++i) part.push_back(std::move(flat[k++]));
    optimizers_[s].step(*sets_[s], std::move(part));
  }
  return norm;
}

nets::OptimizerConfig optimizer_config(const TrainerConfig& cfg, double lr) {
  nets::OptimizerConfig c;
  c.kind = cfg.optimizer;
  c.lr = lr;
  c.clip_norm = cfg.clip_norm;
  return c;
}

nets::AgentNetSpec agent_spec(const envs::Env& env, const TrainerConfig& cfg,
                              std::size_t out_dim) {
  return {env.obs_dim(), env.n_actions(), env.n_agents(), cfg.hidden, out_dim};
}

}  // namespace marl::trainers
