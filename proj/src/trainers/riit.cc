#include "marl/trainers/riit.h"

#include "marl/autodiff/ops.h"
#include "marl/common/error.h"
#include "marl/returns/returns.h"
#include "marl/rollout/select.h"
#include "marl/trainers/batch_tensors.h"

namespace marl::trainers {

namespace {

const TrainerConfig& check_algo(const TrainerConfig& cfg) {
  if (cfg.algo != Algo::kRiit && cfg.algo != Algo::kLica) {
    throw Error("RiitLearner: unsupported algorithm " + to_string(cfg.algo));
  }
  return cfg;
}

double mask_count(const Tensor& mask) {
  double count = 0.0;
  for (double m : mask.values()) count += m;
  if (count == 0.0) throw Error("batch has no unmasked steps");
  return count;
}

Tensor one_hot(const std::vector<std::size_t>& index, std::size_t n) {
  Tensor out({index.size(), n});
  for (std::size_t r = 0; r < index.size(); ++r) out.data()[r * n + index[r]] = 1.0;
  return out;
}

ad::Var masked_mse(ad::Tape& tape, ad::Var pred, const Tensor& targets, const Tensor& mask) {
  const double count = mask_count(mask);
  const ad::Var err = ad::sub(pred, tape.constant(bt_to_column(targets)));
  return ad::scale(ad::sum(ad::mul(ad::square(err), tape.constant(bt_to_column(mask)))),
                   1.0 / count);
}

}  // namespace

RiitLearner::RiitLearner(const TrainerConfig& cfg, const envs::Env& env, Rng& rng)
    : cfg_(check_algo(cfg)),
      n_agents_(env.n_agents()),
      n_actions_(env.n_actions()),
      policy_(agent_spec(env, cfg), rng),
      utility_(agent_spec(env, cfg), rng),
      target_utility_(utility_),
      critic_group_(cfg.clip_norm),
      policy_group_(cfg.clip_norm) {
  const std::size_t S = env.state_dim();
  if (cfg.algo == Algo::kLica) {
    lica_.emplace(mixers::LicaCriticSpec{n_agents_, n_actions_, S, cfg.mixer_embed}, rng);
    target_lica_ = lica_;
    critic_group_.add(lica_->params(), optimizer_config(cfg, cfg.critic_lr));
  } else {
    mixer_.emplace(
        mixers::MonotonicMixerSpec{n_agents_, S, cfg.mixer_embed, cfg.constrain_monotonic}, rng);
    target_mixer_ = mixer_;
    critic_group_.add(utility_.params(), optimizer_config(cfg, cfg.critic_lr));
    critic_group_.add(mixer_->params(), optimizer_config(cfg, cfg.critic_lr));
  }
  policy_group_.add(policy_.params(), optimizer_config(cfg, cfg.lr));
}

nets::ParamSet& RiitLearner::critic_params() noexcept {
  return lica_ ? lica_->params() : mixer_->params();
}
const nets::ParamSet& RiitLearner::critic_params() const noexcept {
  return lica_ ? lica_->params() : mixer_->params();
}
const nets::ParamSet& RiitLearner::target_critic_params() const noexcept {
  return target_lica_ ? target_lica_->params() : target_mixer_->params();
}

rollout::PolicyFactory RiitLearner::behaviour(double) const {
  return [this] { return std::make_unique<rollout::SoftmaxPolicy>(policy_, false); };
}

rollout::PolicyFactory RiitLearner::greedy() const {
  return [this] { return std::make_unique<rollout::SoftmaxPolicy>(policy_, true); };
}

bool RiitLearner::ready(const Buffers& buffers) const {
  return buffers.offline.size() >= cfg_.batch_size &&
         buffers.online.size() >= cfg_.online_batch_size;
}

void RiitLearner::update_targets() {
  if (lica_) {
    target_lica_->params().copy_from(lica_->params());
  } else {
    target_utility_.params().copy_from(utility_.params());
    target_mixer_->params().copy_from(mixer_->params());
  }
}

ad::Var RiitLearner::critic_value(bool target, const nets::Bound& p, ad::Var q, ad::Var w,
                                  ad::Var s) const {
  const std::size_t rows = w.rows() / n_agents_;
  if (lica_) {
    const mixers::LicaCritic& critic = target ? *target_lica_ : *lica_;
    return mixers::lica_critic_eval(critic, p, ad::reshape(w, {rows, n_agents_ * n_actions_}), s);
  }
  const mixers::MonotonicMixer& mixer = target ? *target_mixer_ : *mixer_;
  const ad::Var x = ad::reshape(ad::sum_rows(ad::mul(q, w)), {rows, n_agents_});
  return mixers::qmix_mix(mixer, p, x, s);
}

Tensor RiitLearner::critic_values(const Tensor& q, const Tensor& w, const Tensor& s) const {
  ad::Tape tape;
  const nets::Bound p = nets::bind_constant(tape, critic_params());
  return critic_value(false, p, tape.constant(q), tape.constant(w), tape.constant(s)).value();
}

Tensor RiitLearner::next_values(const rollout::EpisodeBatch& batch, bool recorded,
                                Rng& rng) const {
  const std::size_t T = batch.steps;
  const std::size_t B = batch.batch;
  const std::size_t R = batch.agent_rows();
  const Tensor inputs = batch_agent_inputs(policy_.spec(), batch, T + 1);
  const Tensor probs =
      row_block(softmax_rows(policy_.evaluate_sequence(inputs, T + 1)), R, T * R);

  // Row t*R + r holds the action taken at step t + 1.
  const std::vector<int> sampled =
      rollout::select_actions(probs, 0.0, rollout::SelectMode::kSample, rng);
  std::vector<std::size_t> next(T * R, 0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t r = 0; r < R; ++r) {
      const std::size_t len = batch.lengths[r / n_agents_];
      if (t >= len) continue;
      const bool use_recorded = recorded && t + 1 < len;
      next[t * R + r] = static_cast<std::size_t>(
          use_recorded ? batch.actions[(t + 1) * R + r] : sampled[t * R + r]);
    }
  }

  ad::Tape tape;
  const ad::Var w = tape.constant(one_hot(next, n_actions_));
  const ad::Var s = tape.constant(batch_states(batch, 1, T));
  ad::Var q = w;
  if (!lica_) {
    q = tape.constant(row_block(target_utility_.evaluate_sequence(inputs, T + 1), R, T * R));
  }
  const nets::Bound p = nets::bind_constant(tape, target_critic_params());
  return column_to_bt(critic_value(true, p, q, w, s).value(), B);
}

Tensor RiitLearner::offline_targets(const rollout::EpisodeBatch& batch, Rng& rng) const {
  return returns::one_step_targets(batch.reward, next_values(batch, false, rng),
                                   batch.terminated, batch.mask, cfg_.gamma);
}

Tensor RiitLearner::online_targets(const rollout::EpisodeBatch& batch, Rng& rng) const {
  return returns::td_lambda_targets(batch.reward, next_values(batch, true, rng),
                                    batch.terminated, batch.mask, cfg_.lambda, cfg_.gamma);
}

ad::Var RiitLearner::critic_loss(ad::Tape& tape, const nets::Bound& utility,
                                 const nets::Bound& critic, const rollout::EpisodeBatch& batch,
                                 const Tensor& targets) const {
  const std::size_t T = batch.steps;
  const ad::Var w = tape.constant(one_hot(batch_actions(batch), n_actions_));
  const ad::Var s = tape.constant(batch_states(batch, 0, T));
  ad::Var q = w;
  if (!lica_) {
    q = utility_.forward_sequence(
        utility, tape.constant(batch_agent_inputs(utility_.spec(), batch, T)), T);
  }
  return masked_mse(tape, critic_value(false, critic, q, w, s), targets, batch.mask);
}

RiitLearner::PolicyTerms RiitLearner::policy_terms(ad::Tape& tape, const nets::Bound& policy,
                                                   const rollout::EpisodeBatch& batch) const {
  const std::size_t T = batch.steps;
  const double count = mask_count(batch.mask);
  const Tensor inputs = batch_agent_inputs(policy_.spec(), batch, T);
  const ad::Var logits = policy_.forward_sequence(policy, tape.constant(inputs), T);
  const ad::Var pi = ad::softmax(logits);
  const ad::Var entropy_rows = ad::scale(ad::sum_rows(ad::mul(pi, ad::log_softmax(logits))), -1.0);

  const ad::Var s = tape.constant(batch_states(batch, 0, T));
  ad::Var q = pi;
  if (!lica_) q = tape.constant(utility_.evaluate_sequence(inputs, T));
  const nets::Bound pc = nets::bind_constant(tape, critic_params());
  const ad::Var value = critic_value(false, pc, q, pi, s);

  const Tensor mask = bt_to_column(batch.mask);
  const ad::Var mask_var = tape.constant(mask);
  PolicyTerms terms;
  terms.q = ad::scale(ad::sum(ad::mul(value, mask_var)), -1.0 / count);
  terms.entropy =
      ad::scale(ad::sum(ad::mul(entropy_rows, ad::repeat_rows(mask_var, n_agents_))),
                1.0 / (count * static_cast<double>(n_agents_)));
  return terms;
}

std::vector<Tensor> RiitLearner::adaptive_entropy(const std::vector<Tensor>& q_grads,
                                                  const std::vector<Tensor>& entropy_grads,
                                                  double coef) {
  std::vector<Tensor> out = q_grads;
  const double norm = nets::global_norm(entropy_grads);
  if (norm == 0.0 || coef == 0.0) return out;
  const double factor = coef / norm;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto dst = out[i].values();
    const auto src = entropy_grads[i].values();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] -= factor * src[k];
  }
  return out;
}

double RiitLearner::critic_update(const rollout::EpisodeBatch& batch, const Tensor& targets) {
  ad::Tape tape;
  nets::Bound pu;
  if (!lica_) pu = nets::bind(tape, utility_.params());
  const nets::Bound pc = nets::bind(tape, critic_params());
  const ad::Var l = critic_loss(tape, pu, pc, batch, targets);
  const ad::Gradients g = tape.backward(l);
  if (lica_) {
    critic_group_.step({nets::gradients(g, pc)});
  } else {
    critic_group_.step({nets::gradients(g, pu), nets::gradients(g, pc)});
  }
  return l.value().item();
}

RiitLearner::Losses RiitLearner::train_step(const rollout::EpisodeBatch& offline,
                                            const rollout::EpisodeBatch& online, Rng& rng) {
  Losses losses;
  losses.critic_offline = critic_update(offline, offline_targets(offline, rng));
  losses.critic_online = critic_update(online, online_targets(online, rng));

  ad::Tape tape;
  const nets::Bound pp = nets::bind(tape, policy_.params());
  const PolicyTerms terms = policy_terms(tape, pp, online);
  const std::vector<Tensor> gq = nets::gradients(tape.backward(terms.q), pp);
  const std::vector<Tensor> gh = nets::gradients(tape.backward(terms.entropy), pp);
  policy_group_.step({adaptive_entropy(gq, gh, cfg_.entropy_coef)});
  losses.policy = terms.q.value().item();
  losses.entropy = terms.entropy.value().item();
  ++updates_;
  return losses;
}

double RiitLearner::update(const Buffers& buffers, Rng& rng) {
  const rollout::EpisodeBatch online = buffers.online.latest(cfg_.online_batch_size);
  for (std::size_t k = 1; k < cfg_.offline_updates; ++k) {
    const rollout::EpisodeBatch extra = buffers.offline.sample(cfg_.batch_size, rng);
    critic_update(extra, offline_targets(extra, rng));
  }
  const Losses l = train_step(buffers.offline.sample(cfg_.batch_size, rng), online, rng);
  return 0.5 * (l.critic_offline + l.critic_online);
}

}  // namespace marl::trainers
