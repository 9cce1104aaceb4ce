#include "marl/trainers/vmix.h"

#include "marl/autodiff/ops.h"
#include "marl/common/error.h"
#include "marl/returns/returns.h"
#include "marl/trainers/batch_tensors.h"

namespace marl::trainers {

namespace {

const TrainerConfig& check_algo(const TrainerConfig& cfg) {
  if (cfg.algo != Algo::kVmix) throw Error("VmixLearner: unsupported algorithm " + to_string(cfg.algo));
  return cfg;
}

}  // namespace

VmixLearner::VmixLearner(const TrainerConfig& cfg, const envs::Env& env, Rng& rng)
    : cfg_(check_algo(cfg)),
      n_agents_(env.n_agents()),
      policy_(agent_spec(env, cfg), rng),
      value_(agent_spec(env, cfg, 1), rng),
      mixer_({env.n_agents(), env.state_dim(), cfg.mixer_embed, cfg.constrain_monotonic}, rng),
      group_(cfg.clip_norm) {
  group_.add(policy_.params(), optimizer_config(cfg, cfg.lr));
  group_.add(value_.params(), optimizer_config(cfg, cfg.critic_lr));
  group_.add(mixer_.params(), optimizer_config(cfg, cfg.critic_lr));
}

rollout::PolicyFactory VmixLearner::behaviour(double epsilon) const {
  return [this, epsilon] {
    return std::make_unique<rollout::SoftmaxPolicy>(policy_, false, epsilon);
  };
}

rollout::PolicyFactory VmixLearner::greedy() const {
  return [this] { return std::make_unique<rollout::SoftmaxPolicy>(policy_, true); };
}

bool VmixLearner::ready(const Buffers& buffers) const {
  return buffers.online.size() >= cfg_.workers;
}

double VmixLearner::update(const Buffers& buffers, Rng&) {
  return train_step(buffers.online.latest(cfg_.workers));
}

VmixLearner::Signals VmixLearner::signals(const rollout::EpisodeBatch& batch) const {
  const std::size_t T = batch.steps;
  const std::size_t B = batch.batch;
  const Tensor v = value_.evaluate_sequence(batch_agent_inputs(value_.spec(), batch, T + 1), T + 1)
                       .reshaped({(T + 1) * B, n_agents_});
  ad::Tape tape;
  const nets::Bound p = nets::bind_constant(tape, mixer_.params());
  const Tensor v_tot =
      mixers::value_mix(mixer_, p, tape.constant(v), tape.constant(batch_states(batch, 0, T + 1)))
          .value();
  const Tensor current = column_to_bt(row_block(v_tot, 0, T * B), B);
  const Tensor next = column_to_bt(row_block(v_tot, B, T * B), B);

  Signals out;
  out.targets = returns::td_lambda_targets(batch.reward, next, batch.terminated, batch.mask,
                                           cfg_.lambda, cfg_.gamma);
  out.advantages = Tensor({B, T});
  for (std::size_t k = 0; k < B * T; ++k) {
    if (batch.mask.data()[k] == 0.0) continue;
    const double cont = 1.0 - batch.terminated.data()[k];
    out.advantages.data()[k] =
        batch.reward.data()[k] + cfg_.gamma * cont * next.data()[k] - current.data()[k];
  }
  return out;
}

VmixLearner::LossTerms VmixLearner::loss(ad::Tape& tape, const nets::Bound& policy,
                                         const nets::Bound& value, const nets::Bound& mixer,
                                         const rollout::EpisodeBatch& batch,
                                         const Signals& signals) const {
  const std::size_t T = batch.steps;
  const std::size_t B = batch.batch;
  double count = 0.0;
  for (double m : batch.mask.values()) count += m;
  if (count == 0.0) throw Error("VMIX: batch has no unmasked steps");

  const ad::Var inputs = tape.constant(batch_agent_inputs(policy_.spec(), batch, T));
  const ad::Var s = tape.constant(batch_states(batch, 0, T));
  const ad::Var mask = tape.constant(bt_to_column(batch.mask));

  const ad::Var v = ad::reshape(value_.forward_sequence(value, inputs, T), {T * B, n_agents_});
  const ad::Var err =
      ad::sub(mixers::value_mix(mixer_, mixer, v, s), tape.constant(bt_to_column(signals.targets)));
  LossTerms terms;
  terms.critic = ad::scale(ad::sum(ad::mul(ad::square(err), mask)), 1.0 / count);

  const ad::Var logits = policy_.forward_sequence(policy, inputs, T);
  const ad::Var log_pi = ad::log_softmax(logits);
  const ad::Var chosen = ad::gather(log_pi, batch_actions(batch));
  const ad::Var adv =
      ad::repeat_rows(tape.constant(bt_to_column(signals.advantages)), n_agents_);
  terms.policy = ad::scale(ad::sum(ad::mul(chosen, adv)), -1.0 / count);
  const ad::Var entropy_rows = ad::scale(ad::sum_rows(ad::mul(ad::softmax(logits), log_pi)), -1.0);
  terms.entropy = ad::scale(ad::sum(ad::mul(entropy_rows, ad::repeat_rows(mask, n_agents_))),
                            1.0 / (count * static_cast<double>(n_agents_)));
  terms.total = ad::add(ad::add(terms.critic, terms.policy),
                        ad::scale(terms.entropy, -cfg_.entropy_coef));
  return terms;
}

double VmixLearner::train_step(const rollout::EpisodeBatch& batch) {
  for (std::uint64_t version : batch.policy_versions) {
    if (version != updates_) {
      throw Error("VMIX: stale batch (collected at update " + std::to_string(version) +
                  ", now at " + std::to_string(updates_) + ")");
    }
  }
  const Signals sig = signals(batch);
  ad::Tape tape;
  const nets::Bound pp = nets::bind(tape, policy_.params());
  const nets::Bound pv = nets::bind(tape, value_.params());
  const nets::Bound pm = nets::bind(tape, mixer_.params());
  const LossTerms terms = loss(tape, pp, pv, pm, batch, sig);
  const ad::Gradients g = tape.backward(terms.total);
  group_.step({nets::gradients(g, pp), nets::gradients(g, pv), nets::gradients(g, pm)});
  ++updates_;
  return terms.critic.value().item();
}

}  // namespace marl::trainers
