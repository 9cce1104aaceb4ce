#include "marl/nets/params.h"

#include <cmath>

#include "marl/common/error.h"

namespace marl::nets {

std::size_t ParamSet::add(std::string name, Tensor value) {
  for (const auto& n : names_) {
    if (n == name) throw Error("duplicate parameter name '" + name + "'");
  }
  names_.push_back(std::move(name));
  tensors_.push_back(std::move(value));
  return tensors_.size() - 1;
}

const Tensor& ParamSet::get(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return tensors_[i];
  }
  throw Error("no parameter named '" + std::string(name) + "'");
}

Tensor& ParamSet::get(std::string_view name) {
  return const_cast<Tensor&>(static_cast<const ParamSet&>(*this).get(name));
}

std::size_t ParamSet::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& t : tensors_) n += t.size();
  return n;
}

bool ParamSet::same_layout(const ParamSet& other) const {
  if (names_ != other.names_) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].shape() != other.tensors_[i].shape()) return false;
  }
  return true;
}

void ParamSet::copy_from(const ParamSet& other) {
  if (!same_layout(other)) throw Error("copy_from: parameter layouts differ");
  tensors_ = other.tensors_;
}

Bound bind(ad::Tape& tape, const ParamSet& params) {
  std::vector<ad::Var> vars;
  vars.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) vars.push_back(tape.leaf(params[i]));
  return Bound(std::move(vars));
}

Bound bind_constant(ad::Tape& tape, const ParamSet& params) {
  std::vector<ad::Var> vars;
  vars.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) vars.push_back(tape.constant(params[i]));
  return Bound(std::move(vars));
}

std::vector<Tensor> gradients(const ad::Gradients& grads, const Bound& bound) {
  std::vector<Tensor> out;
  out.reserve(bound.size());
  for (ad::Var v : bound.vars()) out.push_back(grads[v]);
  return out;
}

void accumulate(std::vector<Tensor>& a, const std::vector<Tensor>& b) {
  if (a.size() != b.size()) throw ShapeError("accumulate: gradient lists differ in length");
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].shape() != b[k].shape()) throw ShapeError("accumulate: gradient shapes differ");
    for (std::size_t i = 0; i < a[k].size(); ++i) a[k][i] += b[k][i];
  }
}

double global_norm(const std::vector<Tensor>& grads) {
  double total = 0.0;
  for (const Tensor& g : grads) {
    for (double v : g.values()) total += v * v;
  }
  return std::sqrt(total);
}

}  // namespace marl::nets
