#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <string_view>
#include <vector>

#include "marl/autodiff/tensor.h"

namespace marl::ad {

using NodeId = std::uint32_t;

enum class OpKind : std::uint8_t {
  kLeaf,
  kConstant,
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kScale,
  kRelu,
  kElu,
  kTanh,
  kSigmoid,
  kSoftmax,
  kLogSoftmax,
  kAbs,
  kSquare,
  kSum,
  kMean,
  kSumRows,
  kGather,
  kConcatCols,
  kConcatRows,
  kSliceCols,
  kSliceRows,
  kReshape,
  kRepeatRows,
  kRowMax,
  kBatchedVecMat,
  kLinear,
  kGruCell,
};

std::string_view op_name(OpKind kind);

// How the second operand of an elementwise binary op is expanded.
enum class Broadcast : std::uint8_t { kNone, kRow, kCol, kScalar };

class Tape;

// Handle to a node on a tape. Cheap to copy; invalidated by Tape::clear().
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  NodeId id() const noexcept { return id_; }
  Tape* tape() const noexcept { return tape_; }
  bool valid() const noexcept;

 private:
  friend class Tape;
  Var(Tape* tape, NodeId id, std::uint64_t generation)
      : tape_(tape), id_(id), generation_(generation) {}

  Tape* tape_ = nullptr;
  NodeId id_ = 0;
  std::uint64_t generation_ = 0;
};

// Result of Tape::backward. Outlives the tape it came from.
class Gradients {
 public:
  // d loss / d v; zeros of v's shape when v does not reach the loss.
  Tensor operator[](Var v) const;
  bool reached(Var v) const;

 private:
  friend class Tape;
  std::uint64_t generation_ = 0;
  const Tape* tape_ = nullptr;
  std::vector<Tensor> grads_;
};

// Append-only record of forward evaluations. Node inputs always precede the
// node itself, so a reverse sweep is a valid topological order.
class Tape {
 public:
  struct Node {
    OpKind kind = OpKind::kConstant;
    std::array<NodeId, 2> in{0, 0};
    std::uint8_t arity = 0;
    std::vector<NodeId> inputs;  // variadic ops (concat)
    bool requires_grad = false;
    Tensor value;
    double scalar = 0.0;
    std::size_t p0 = 0;
    std::size_t p1 = 0;
    std::vector<std::size_t> index;
    Tensor aux;  // extra forward values kept for the backward pass
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Differentiable input (parameters and anything grad_check perturbs).
  Var leaf(Tensor value);
  // Input that never receives a gradient.
  Var constant(Tensor value);

  Gradients backward(Var loss) const;

  // Drops every node. Vars from before the call become invalid.
  void clear();
  // Drops nodes from `n` on, keeping earlier ones (e.g. bound parameters).
  // Vars for dropped nodes must not be used again.
  void truncate(std::size_t n);
  std::size_t size() const noexcept { return nodes_.size(); }
  std::uint64_t generation() const noexcept { return generation_; }

  // Branch tracking: non-smooth ops hash which side of their kink each
  // element is on, so callers can tell whether two evaluations took the
  // same smooth branch.
  void set_track_branches(bool on) noexcept { track_branches_ = on; }
  bool tracking_branches() const noexcept { return track_branches_; }
  std::uint64_t branch_signature() const noexcept { return branch_hash_; }
  void record_branch(std::uint64_t bits) noexcept;

  // Used by the op implementations.
  Var push(Node node);
  const Node& node(Var v) const;
  const Node& node(NodeId id) const { return nodes_[id]; }
  void check(Var v, std::string_view op) const;

 private:
  std::deque<Node> nodes_;  // stable references across push
  std::uint64_t generation_ = 1;
  bool track_branches_ = false;
  std::uint64_t branch_hash_ = 1469598103934665603ULL;
};

}  // namespace marl::ad
