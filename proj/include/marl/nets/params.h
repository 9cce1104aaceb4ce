#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "marl/autodiff/tape.h"

namespace marl::nets {

using ad::Tensor;

// Ordered collection of named parameter tensors owned by one network.
class ParamSet {
 public:
  std::size_t add(std::string name, Tensor value);

  std::size_t size() const noexcept { return tensors_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Tensor& operator[](std::size_t i) { return tensors_[i]; }
  const Tensor& operator[](std::size_t i) const { return tensors_[i]; }
  const Tensor& get(std::string_view name) const;
  Tensor& get(std::string_view name);

  // Total number of scalars.
  std::size_t parameter_count() const;
  // Overwrites every tensor with the matching one from `other`.
  void copy_from(const ParamSet& other);
  bool same_layout(const ParamSet& other) const;

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
};

// Parameters placed on a tape for one forward pass.
class Bound {
 public:
  Bound() = default;
  Bound(std::vector<ad::Var> vars) : vars_(std::move(vars)) {}
  ad::Var operator[](std::size_t i) const { return vars_[i]; }
  std::size_t size() const noexcept { return vars_.size(); }
  const std::vector<ad::Var>& vars() const noexcept { return vars_; }

 private:
  std::vector<ad::Var> vars_;
};

// Leaves: receive gradients.
Bound bind(ad::Tape& tape, const ParamSet& params);
// Constants: used for target networks and frozen evaluation.
Bound bind_constant(ad::Tape& tape, const ParamSet& params);

// Gradient of the loss for every bound parameter, in ParamSet order.
std::vector<Tensor> gradients(const ad::Gradients& grads, const Bound& bound);

// In-place a += b for gradient lists of identical layout.
void accumulate(std::vector<Tensor>& a, const std::vector<Tensor>& b);
double global_norm(const std::vector<Tensor>& grads);

}  // namespace marl::nets
