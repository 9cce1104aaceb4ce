#pragma once

#include <cstddef>
#include <string>

#include "marl/common/rng.h"
#include "marl/nets/params.h"

namespace marl::nets {

// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
Tensor uniform_init(ad::Shape shape, std::size_t fan_in, Rng& rng);

enum class BiasInit {
  kZero,
  kUniform,  // same bound as the weights
};

// y = x W + b. Registers "<name>.w" [in,out] and "<name>.b" [1,out].
class Linear {
 public:
  Linear() = default;
  Linear(ParamSet& params, const std::string& name, std::size_t in, std::size_t out, Rng& rng,
         BiasInit bias = BiasInit::kZero);

  ad::Var operator()(const Bound& p, ad::Var x) const;

  std::size_t in_dim() const noexcept { return in_; }
  std::size_t out_dim() const noexcept { return out_; }
  std::size_t weight_index() const noexcept { return w_; }
  std::size_t bias_index() const noexcept { return b_; }

 private:
  std::size_t in_ = 0;
  std::size_t out_ = 0;
  std::size_t w_ = 0;
  std::size_t b_ = 0;
};

// Linear -> ReLU -> Linear.
class TwoLayer {
 public:
  TwoLayer() = default;
  TwoLayer(ParamSet& params, const std::string& name, std::size_t in, std::size_t hidden,
           std::size_t out, Rng& rng, BiasInit bias = BiasInit::kZero);

  ad::Var operator()(const Bound& p, ad::Var x) const;
  const Linear& first() const noexcept { return first_; }
  const Linear& second() const noexcept { return second_; }

 private:
  Linear first_;
  Linear second_;
};

// GRU cell over "<name>.w_x" [in,3H], "<name>.w_h" [H,3H], "<name>.b" [1,3H].
class Gru {
 public:
  Gru() = default;
  Gru(ParamSet& params, const std::string& name, std::size_t in, std::size_t hidden, Rng& rng);

  ad::Var operator()(const Bound& p, ad::Var x, ad::Var h) const;
  std::size_t hidden_dim() const noexcept { return hidden_; }

 private:
  std::size_t in_ = 0;
  std::size_t hidden_ = 0;
  std::size_t w_x_ = 0;
  std::size_t w_h_ = 0;
  std::size_t b_ = 0;
};

}  // namespace marl::nets
