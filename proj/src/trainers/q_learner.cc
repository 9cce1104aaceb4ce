#include "marl/trainers/q_learner.h"

#include "marl/autodiff/ops.h"
#include "marl/common/error.h"
#include "marl/mixers/owqmix.h"
#include "marl/mixers/vdn.h"
#include "marl/returns/returns.h"
#include "marl/trainers/batch_tensors.h"

namespace marl::trainers {

namespace {

QLearner* check_algo(const TrainerConfig& cfg) {
  if (!is_value_based(cfg.algo)) {
    throw Error("QLearner: " + to_string(cfg.algo) + " is not a value-based algorithm");
  }
  return nullptr;
}

}  // namespace

nets::ParamSet& QLearner::Mixers::params() {
  return const_cast<nets::ParamSet&>(std::as_const(*this).params());
}

const nets::ParamSet& QLearner::Mixers::params() const {
  if (qmix) return qmix->params();
  if (qatten) return qatten->params();
  if (qplex) return qplex->params();
  return empty;
}

nets::ParamSet& QLearner::Mixers::central_params() {
  return central ? central->params() : empty;
}

const nets::ParamSet& QLearner::Mixers::central_params() const {
  return central ? central->params() : empty;
}

QLearner::QLearner(const TrainerConfig& cfg, const envs::Env& env, Rng& rng)
    : cfg_((check_algo(cfg), cfg)),
      n_agents_(env.n_agents()),
      n_actions_(env.n_actions()),
      agent_(agent_spec(env, cfg), rng),
      target_agent_(agent_),
      group_(cfg.clip_norm) {
  const std::size_t n = env.n_agents();
  const std::size_t S = env.state_dim();
  switch (cfg.algo) {
    case Algo::kQmix:
    case Algo::kOwQmix:
      live_.qmix.emplace(mixers::MonotonicMixerSpec{n, S, cfg.mixer_embed,
                                                    cfg.constrain_monotonic},
                         rng);
      break;
    case Algo::kQatten:
      live_.qatten.emplace(mixers::QattenSpec{n, S, env.obs_dim(), cfg.mixer_embed,
                                              cfg.attention_heads, cfg.constrain_monotonic},
                           rng);
      break;
    case Algo::kQplex:
      live_.qplex.emplace(mixers::QplexSpec{n, env.n_actions(), S, cfg.mixer_embed,
                                            cfg.constrain_monotonic},
                          rng);
      break;
    default:
      break;
  }
  if (cfg.algo == Algo::kOwQmix) {
    live_.central.emplace(mixers::CentralCriticSpec{n, S, cfg.mixer_embed}, rng);
  }
  target_.qmix = live_.qmix;
  target_.qatten = live_.qatten;
  target_.qplex = live_.qplex;
  target_.central = live_.central;

  group_.add(agent_.params(), optimizer_config(cfg, cfg.lr));
  group_.add(live_.params(), optimizer_config(cfg, cfg.critic_lr));
  group_.add(live_.central_params(), optimizer_config(cfg, cfg.critic_lr));
}

nets::ParamSet& QLearner::mixer_params() noexcept { return live_.params(); }
const nets::ParamSet& QLearner::mixer_params() const noexcept { return live_.params(); }
const nets::ParamSet& QLearner::target_mixer_params() const noexcept {
  return target_.params();
}
nets::ParamSet& QLearner::central_params() noexcept { return live_.central_params(); }
const nets::ParamSet& QLearner::central_params() const noexcept {
  return live_.central_params();
}

rollout::PolicyFactory QLearner::behaviour(double epsilon) const {
  return [this, epsilon] { return std::make_unique<rollout::GreedyPolicy>(agent_, epsilon); };
}

rollout::PolicyFactory QLearner::greedy() const { return behaviour(0.0); }

bool QLearner::ready(const Buffers& buffers) const {
  return buffers.offline.size() >= cfg_.batch_size;
}

double QLearner::update(const Buffers& buffers, Rng& rng) {
  return train_step(buffers.offline.sample(cfg_.batch_size, rng));
}

void QLearner::update_targets() {
  target_agent_.params().copy_from(agent_.params());
  target_.params().copy_from(live_.params());
  target_.central_params().copy_from(live_.central_params());
}

ad::Var QLearner::mix(const Mixers& m, const nets::Bound& p, ad::Var q_all,
                      const std::vector<std::size_t>& chosen, ad::Var s, ad::Var feats) const {
  if (m.qplex) return mixers::qplex_mix(*m.qplex, p, q_all, chosen, s);
  const std::size_t rows = chosen.size() / n_agents_;
  const ad::Var q = ad::reshape(ad::gather(q_all, chosen), {rows, n_agents_});
  if (m.qmix) return mixers::qmix_mix(*m.qmix, p, q, s);
  if (m.qatten) return mixers::qatten_mix(*m.qatten, p, q, s, feats);
  return mixers::vdn_mix(q);
}

Tensor QLearner::build_targets(const rollout::EpisodeBatch& batch) const {
  const std::size_t T = batch.steps;
  const std::size_t B = batch.batch;
  const std::size_t R = batch.agent_rows();
  const Tensor all = target_agent_.evaluate_sequence(
      batch_agent_inputs(target_agent_.spec(), batch, T + 1), T + 1);
  const Tensor next = row_block(all, R, T * R);
  const std::vector<std::size_t> greedy = row_argmax(next);

  ad::Tape tape;
  const ad::Var q_all = tape.constant(next);
  const ad::Var s = tape.constant(batch_states(batch, 1, T));
  Tensor boot;
  if (target_.central) {
    const nets::Bound p = nets::bind_constant(tape, target_.central->params());
    const ad::Var q = ad::reshape(ad::gather(q_all, greedy), {T * B, n_agents_});
    boot = target_.central->forward(p, q, s).value();
  } else {
    const nets::Bound p = nets::bind_constant(tape, target_.params());
    const ad::Var feats = target_.qatten ? tape.constant(batch_obs(batch, 1, T)) : q_all;
    boot = mix(target_, p, q_all, greedy, s, feats).value();
  }
  return returns::peng_q_lambda_targets(batch.reward, column_to_bt(boot, B), batch.terminated,
                                        batch.mask, cfg_.lambda, cfg_.gamma);
}

ad::Var QLearner::loss(ad::Tape& tape, const nets::Bound& agent, const nets::Bound& mixer,
                       const nets::Bound& central, const rollout::EpisodeBatch& batch,
                       const Tensor& targets) const {
  const std::size_t T = batch.steps;
  const std::size_t B = batch.batch;
  double count = 0.0;
  for (double m : batch.mask.values()) count += m;
  if (count == 0.0) throw Error("QLearner: batch has no unmasked steps");

  const ad::Var inputs = tape.constant(batch_agent_inputs(agent_.spec(), batch, T));
  const ad::Var q_all = agent_.forward_sequence(agent, inputs, T);
  const std::vector<std::size_t> chosen = batch_actions(batch);
  const ad::Var s = tape.constant(batch_states(batch, 0, T));
  const ad::Var feats = live_.qatten ? tape.constant(batch_obs(batch, 0, T)) : s;
  const ad::Var q_tot = mix(live_, mixer, q_all, chosen, s, feats);

  const Tensor y = bt_to_column(targets);
  const Tensor mask = bt_to_column(batch.mask);
  Tensor weight = mask;
  if (cfg_.algo == Algo::kOwQmix) {
    const Tensor& q = q_tot.value();
    for (std::size_t r = 0; r < weight.size(); ++r) {
      if (mask.data()[r] != 0.0) {
        weight.data()[r] = mixers::owqmix_weight(q.data()[r], y.data()[r], cfg_.alpha);
      }
    }
  }
  const ad::Var y_var = tape.constant(y);
  const ad::Var td = ad::sub(q_tot, y_var);
  ad::Var total =
      ad::scale(ad::sum(ad::mul(ad::square(td), tape.constant(weight))), 1.0 / count);
  if (live_.central) {
    const ad::Var q = ad::detach(ad::reshape(ad::gather(q_all, chosen), {T * B, n_agents_}));
    const ad::Var err = ad::sub(live_.central->forward(central, q, s), y_var);
    total = ad::add(total, ad::scale(ad::sum(ad::mul(ad::square(err), tape.constant(mask))),
                                     1.0 / count));
  }
  return total;
}

double QLearner::train_step(const rollout::EpisodeBatch& batch) {
  const Tensor targets = build_targets(batch);
  ad::Tape tape;
  const nets::Bound pa = nets::bind(tape, agent_.params());
  const nets::Bound pm = nets::bind(tape, live_.params());
  const nets::Bound pc = nets::bind(tape, live_.central_params());
  const ad::Var l = loss(tape, pa, pm, pc, batch, targets);
  const double value = l.value().item();
  const ad::Gradients g = tape.backward(l);
  group_.step({nets::gradients(g, pa), nets::gradients(g, pm), nets::gradients(g, pc)});
  ++updates_;
  return value;
}

Tensor QLearner::agent_values(std::span<const double> obs) const {
  const std::vector<int> none(n_agents_, -1);
  nets::AgentRunner runner(agent_);
  runner.reset(n_agents_);
  return runner.step(nets::agent_inputs(agent_.spec(), obs, none));
}

Tensor QLearner::joint_values(std::span<const double> state, std::span<const double> obs) const {
  const Tensor q = agent_values(obs);
  std::size_t J = 1;
  for (std::size_t i = 0; i < n_agents_; ++i) J *= n_actions_;
  const std::size_t A = n_actions_;
  Tensor q_all({J * n_agents_, A});
  Tensor s({J, state.size()});
  Tensor feats({J * n_agents_, agent_.spec().obs_dim});
  std::vector<std::size_t> chosen(J * n_agents_);
  for (std::size_t j = 0; j < J; ++j) {
    std::size_t code = j;
    for (std::size_t i = n_agents_; i-- > 0;) {
      chosen[j * n_agents_ + i] = code % A;
      code /= A;
    }
    std::copy(q.data(), q.data() + n_agents_ * A, q_all.data() + j * n_agents_ * A);
    std::copy(state.begin(), state.end(), s.data() + j * state.size());
    std::copy(obs.begin(), obs.end(), feats.data() + j * obs.size());
  }
  ad::Tape tape;
  const nets::Bound p = nets::bind_constant(tape, live_.params());
  const ad::Var sv = tape.constant(s);
  return mix(live_, p, tape.constant(q_all), chosen, sv, tape.constant(feats)).value();
}

}  // namespace marl::trainers
