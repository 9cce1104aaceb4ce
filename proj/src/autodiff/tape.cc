#include "marl/autodiff/tape.h"

#include <string>
#include <utility>

#include "marl/common/error.h"

namespace marl::ad {

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kConstant: return "constant";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kRelu: return "relu";
    case OpKind::kElu: return "elu";
    case OpKind::kTanh: return "tanh";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kLogSoftmax: return "log_softmax";
    case OpKind::kAbs: return "abs";
    case OpKind::kSquare: return "square";
    case OpKind::kSum: return "sum";
    case OpKind::kMean: return "mean";
    case OpKind::kSumRows: return "sum_rows";
    case OpKind::kGather: return "gather";
    case OpKind::kConcatCols: return "concat_cols";
    case OpKind::kConcatRows: return "concat_rows";
    case OpKind::kSliceCols: return "slice_cols";
    case OpKind::kSliceRows: return "slice_rows";
    case OpKind::kReshape: return "reshape";
    case OpKind::kRepeatRows: return "repeat_rows";
    case OpKind::kRowMax: return "row_max";
    case OpKind::kBatchedVecMat: return "batched_vecmat";
    case OpKind::kLinear: return "linear";
    case OpKind::kGruCell: return "gru_cell";
  }
  return "unknown";
}

const Tensor& Var::value() const {
  if (!valid()) throw Error("use of an invalid or stale tape variable");
  return tape_->node(id_).value;
}

bool Var::valid() const noexcept {
  return tape_ != nullptr && generation_ == tape_->generation() && id_ < tape_->size();
}

Tensor Gradients::operator[](Var v) const {
  if (v.tape() != tape_ || !v.valid() || tape_->generation() != generation_) {
    throw Error("gradient lookup for a variable from another tape or update");
  }
  const Tape::Node& node = tape_->node(v);
  if (node.kind != OpKind::kLeaf && node.kind != OpKind::kConstant) {
    throw Error("gradients are only retained for tape inputs, not '" +
                std::string(op_name(node.kind)) + "' nodes");
  }
  const Tensor& g = grads_[v.id()];
  if (g.empty() && !node.value.empty()) return Tensor(node.value.shape());
  return g;
}

bool Gradients::reached(Var v) const {
  return v.tape() == tape_ && v.id() < grads_.size() && !grads_[v.id()].empty();
}

Var Tape::leaf(Tensor value) {
  if (value.empty()) throw ShapeError("leaf: empty tensor");
  Node node;
  node.kind = OpKind::kLeaf;
  node.requires_grad = true;
  node.value = std::move(value);
  return push(std::move(node));
}

Var Tape::constant(Tensor value) {
  if (value.empty()) throw ShapeError("constant: empty tensor");
  Node node;
  node.kind = OpKind::kConstant;
  node.value = std::move(value);
  return push(std::move(node));
}

void Tape::clear() {
  nodes_.clear();
  ++generation_;
  branch_hash_ = 1469598103934665603ULL;
}

void Tape::truncate(std::size_t n) {
  if (n < nodes_.size()) nodes_.resize(n);
}

void Tape::record_branch(std::uint64_t bits) noexcept {
  branch_hash_ ^= bits + 0x9e3779b97f4a7c15ULL + (branch_hash_ << 6) + (branch_hash_ >> 2);
}

Var Tape::push(Node node) {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(node));
  return Var(this, id, generation_);
}

const Tape::Node& Tape::node(Var v) const {
  check(v, "node");
  return nodes_[v.id()];
}

void Tape::check(Var v, std::string_view op) const {
  if (v.tape() != this) {
    throw Error(std::string(op) + ": operand belongs to a different tape");
  }
  if (v.generation_ != generation_ || v.id() >= nodes_.size()) {
    throw Error(std::string(op) + ": operand is stale (tape was cleared)");
  }
}

}  // namespace marl::ad
