#include "marl/trainers/capacity.h"

#include "marl/autodiff/ops.h"
#include "marl/common/error.h"
#include "marl/mixers/monotonic_mixer.h"
#include "marl/nets/optimizer.h"

namespace marl::trainers {

using ad::Tensor;

CapacityResult fit_payoff(const envs::Payoff& payoff, const CapacityConfig& cfg) {
  if (auto issues = envs::MatrixGameSpec{payoff}.validate(); !issues.empty()) {
    throw ConfigError(std::move(issues));
  }
  const std::size_t A = payoff.size();
  const std::size_t J = A * A;
  Rng rng(cfg.seed);

  nets::ParamSet tables;
  for (const char* name : {"q1", "q2"}) {
    Tensor t({1, A});
    for (double& v : t.values()) v = 2.0 * uniform01(rng) - 1.0;
    tables.add(name, std::move(t));
  }
  mixers::MonotonicMixer mixer({2, 1, cfg.embed, cfg.constrain}, rng);

  // Row j = u1 * A + u2 of the joint-action table.
  std::vector<std::size_t> pick1(J), pick2(J);
  Tensor target({J, 1});
  for (std::size_t j = 0; j < J; ++j) {
    pick1[j] = j / A;
    pick2[j] = j % A;
    target.data()[j] = payoff[j / A][j % A];
  }
  const Tensor state({J, 1}, 0.0);

  auto forward = [&](ad::Tape& tape, const nets::Bound& pt, const nets::Bound& pm) {
    // Gather per joint action through a [J, A] broadcast of each table.
    const ad::Var rows1 = ad::repeat_rows(pt[0], J);
    const ad::Var rows2 = ad::repeat_rows(pt[1], J);
    const ad::Var parts[] = {ad::gather(rows1, pick1), ad::gather(rows2, pick2)};
    return mixers::qmix_mix(mixer, pm, ad::concat_cols(parts), tape.constant(state));
  };

  nets::OptimizerConfig oc;
  oc.lr = cfg.lr;
  oc.clip_norm = 0.0;
  nets::Optimizer opt_tables(oc, tables);
  nets::Optimizer opt_mixer(oc, mixer.params());
  double mse = 0.0;
  for (std::size_t it = 0; it <= cfg.iterations; ++it) {
    ad::Tape tape;
    const nets::Bound pt = nets::bind(tape, tables);
    const nets::Bound pm = nets::bind(tape, mixer.params());
    const ad::Var err = ad::sub(forward(tape, pt, pm), tape.constant(target));
    const ad::Var loss = ad::mean(ad::square(err));
    mse = loss.value().item();
    if (it == cfg.iterations) break;
    const ad::Gradients g = tape.backward(loss);
    opt_tables.step(tables, nets::gradients(g, pt));
    opt_mixer.step(mixer.params(), nets::gradients(g, pm));
  }

  ad::Tape tape;
  CapacityResult out;
  out.mse = mse;
  out.q_tot = forward(tape, nets::bind_constant(tape, tables),
                      nets::bind_constant(tape, mixer.params()))
                  .value()
                  .reshaped({A, A});
  return out;
}

}  // namespace marl::trainers
