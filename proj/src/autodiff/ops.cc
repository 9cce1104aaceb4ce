#include "marl/autodiff/ops.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "marl/common/error.h"

namespace marl::ad {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

[[noreturn]] void shape_mismatch(std::string_view op, const Shape& a, const Shape& b) {
  throw ShapeError("shape mismatch in " + std::string(op) + ": " + to_string(a) +
                   " vs " + to_string(b));
}

Tape& tape_of(Var a, std::string_view op) {
  if (a.tape() == nullptr) throw Error(std::string(op) + ": operand is not on a tape");
  a.tape()->check(a, op);
  return *a.tape();
}

Tape& tape_of(Var a, Var b, std::string_view op) {
  Tape& t = tape_of(a, op);
  t.check(b, op);
  return t;
}

Var record(Tape& tape, OpKind kind, std::initializer_list<Var> inputs, Tensor value,
           double scalar = 0.0, std::size_t p0 = 0, std::size_t p1 = 0,
           std::vector<std::size_t> index = {}) {
  Tape::Node node;
  node.kind = kind;
  for (Var v : inputs) {
    node.in[node.arity++] = v.id();
    node.requires_grad = node.requires_grad || tape.node(v.id()).requires_grad;
  }
  node.value = std::move(value);
  node.scalar = scalar;
  node.p0 = p0;
  node.p1 = p1;
  node.index = std::move(index);
  return tape.push(std::move(node));
}

Broadcast broadcast_kind(std::string_view op, const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) return Broadcast::kNone;
  if (b.size() == 1) return Broadcast::kScalar;
  if (b.rows() == 1 && b.cols() == a.cols() && a.rank() == 2) return Broadcast::kRow;
  if (b.cols() == 1 && b.rows() == a.rows() && a.rank() == 2) return Broadcast::kCol;
  if (a.size() == b.size() && a.rows() == b.rows() && a.cols() == b.cols()) {
    return Broadcast::kNone;
  }
  shape_mismatch(op, a.shape(), b.shape());
}

template <typename F>
Tensor binary(const Tensor& a, const Tensor& b, Broadcast mode, F f) {
  Tensor out(a.shape());
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  switch (mode) {
    case Broadcast::kNone:
      for (std::size_t i = 0; i < a.size(); ++i) po[i] = f(pa[i], pb[i]);
      break;
    case Broadcast::kScalar:
      for (std::size_t i = 0; i < a.size(); ++i) po[i] = f(pa[i], pb[0]);
      break;
    case Broadcast::kRow:
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) po[r * cols + c] = f(pa[r * cols + c], pb[c]);
      }
      break;
    case Broadcast::kCol:
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) po[r * cols + c] = f(pa[r * cols + c], pb[r]);
      }
      break;
  }
  return out;
}

template <typename F>
Var unary(Var a, OpKind kind, F f) {
  Tape& tape = tape_of(a, op_name(kind));
  const Tensor& x = a.value();
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
  return record(tape, kind, {a}, std::move(out));
}

// Hash of which side of zero each element is on.
void record_sign_pattern(Tape& tape, const Tensor& x) {
  if (!tape.tracking_branches()) return;
  std::uint64_t bits = 0;
  std::size_t filled = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    bits = (bits << 1) | (x[i] > 0.0 ? 1U : 0U);
    if (++filled == 64) {
      tape.record_branch(bits);
      bits = 0;
      filled = 0;
    }
  }
  tape.record_branch(bits ^ (filled << 57));
}

Var binary_op(Var a, Var b, OpKind kind) {
  Tape& tape = tape_of(a, b, op_name(kind));
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  const Broadcast mode = broadcast_kind(op_name(kind), x, y);
  Tensor out;
  switch (kind) {
    case OpKind::kAdd:
      out = binary(x, y, mode, [](double p, double q) { return p + q; });
      break;
    case OpKind::kSub:
      out = binary(x, y, mode, [](double p, double q) { return p - q; });
      break;
    default:
      out = binary(x, y, mode, [](double p, double q) { return p * q; });
      break;
  }
  return record(tape, kind, {a, b}, std::move(out), 0.0, static_cast<std::size_t>(mode));
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& tape = tape_of(a, b, "matmul");
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.cols() != y.rows()) shape_mismatch("matmul", x.shape(), y.shape());
  Tensor out({x.rows(), y.cols()});
  MutMap(out.data(), x.rows(), y.cols()).noalias() =
      ConstMap(x.data(), x.rows(), x.cols()) * ConstMap(y.data(), y.rows(), y.cols());
  return record(tape, OpKind::kMatMul, {a, b}, std::move(out));
}

Var add(Var a, Var b) { return binary_op(a, b, OpKind::kAdd); }
Var sub(Var a, Var b) { return binary_op(a, b, OpKind::kSub); }
Var mul(Var a, Var b) { return binary_op(a, b, OpKind::kMul); }

Var scale(Var a, double factor) {
  Tape& tape = tape_of(a, "scale");
  Tensor out = a.value();
  for (double& v : out.values()) v *= factor;
  return record(tape, OpKind::kScale, {a}, std::move(out), factor);
}

Var relu(Var a) {
  record_sign_pattern(tape_of(a, "relu"), a.value());
  return unary(a, OpKind::kRelu, [](double x) { return x > 0.0 ? x : 0.0; });
}

// Continuously differentiable for alpha = 1, so no branch record.
Var elu(Var a) {
  return unary(a, OpKind::kElu, [](double x) { return x > 0.0 ? x : std::expm1(x); });
}

Var tanh(Var a) {
  return unary(a, OpKind::kTanh, [](double x) { return std::tanh(x); });
}

Var sigmoid(Var a) {
  return unary(a, OpKind::kSigmoid, [](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  });
}

Var abs(Var a) {
  record_sign_pattern(tape_of(a, "abs"), a.value());
  return unary(a, OpKind::kAbs, [](double x) { return std::fabs(x); });
}

Var square(Var a) {
  return unary(a, OpKind::kSquare, [](double x) { return x * x; });
}

Var softmax(Var a) {
  Tape& tape = tape_of(a, "softmax");
  const Tensor& x = a.value();
  Tensor out(x.shape());
  const std::size_t cols = x.cols();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* in = x.data() + r * cols;
    double* o = out.data() + r * cols;
    const double mx = *std::max_element(in, in + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += (o[c] = std::exp(in[c] - mx));
    for (std::size_t c = 0; c < cols; ++c) o[c] /= total;
  }
  return record(tape, OpKind::kSoftmax, {a}, std::move(out));
}

Var log_softmax(Var a) {
  Tape& tape = tape_of(a, "log_softmax");
  const Tensor& x = a.value();
  Tensor out(x.shape());
  const std::size_t cols = x.cols();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* in = x.data() + r * cols;
    double* o = out.data() + r * cols;
    const double mx = *std::max_element(in, in + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += std::exp(in[c] - mx);
    const double lse = mx + std::log(total);
    for (std::size_t c = 0; c < cols; ++c) o[c] = in[c] - lse;
  }
  return record(tape, OpKind::kLogSoftmax, {a}, std::move(out));
}

Var sum(Var a) {
  Tape& tape = tape_of(a, "sum");
  double total = 0.0;
  for (double v : a.value().values()) total += v;
  return record(tape, OpKind::kSum, {a}, Tensor::scalar(total));
}

Var mean(Var a) {
  Tape& tape = tape_of(a, "mean");
  double total = 0.0;
  for (double v : a.value().values()) total += v;
  return record(tape, OpKind::kMean, {a},
                Tensor::scalar(total / static_cast<double>(a.value().size())));
}

Var sum_rows(Var a) {
  Tape& tape = tape_of(a, "sum_rows");
  const Tensor& x = a.value();
  Tensor out({x.rows(), 1});
  const std::size_t cols = x.cols();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += x[r * cols + c];
    out[r] = total;
  }
  return record(tape, OpKind::kSumRows, {a}, std::move(out));
}

Var row_max(Var a) {
  Tape& tape = tape_of(a, "row_max");
  const Tensor& x = a.value();
  const std::size_t cols = x.cols();
  Tensor out({x.rows(), 1});
  std::vector<std::size_t> arg(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* in = x.data() + r * cols;
    arg[r] = static_cast<std::size_t>(std::max_element(in, in + cols) - in);
    out[r] = in[arg[r]];
    if (tape.tracking_branches()) tape.record_branch(arg[r]);
  }
  return record(tape, OpKind::kRowMax, {a}, std::move(out), 0.0, 0, 0, std::move(arg));
}

Var gather(Var a, std::span<const std::size_t> index) {
  Tape& tape = tape_of(a, "gather");
  const Tensor& x = a.value();
  if (index.size() != x.rows()) {
    throw ShapeError("shape mismatch in gather: " + to_string(x.shape()) + " with " +
                     std::to_string(index.size()) + " indices");
  }
  Tensor out({x.rows(), 1});
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (index[r] >= x.cols()) {
      throw ShapeError("gather: index " + std::to_string(index[r]) + " out of range for " +
                       to_string(x.shape()));
    }
    out[r] = x.at(r, index[r]);
  }
  return record(tape, OpKind::kGather, {a}, std::move(out), 0.0, 0, 0,
                std::vector<std::size_t>(index.begin(), index.end()));
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no operands");
  Tape& tape = tape_of(parts[0], "concat_cols");
  const std::size_t rows = parts[0].value().rows();
  std::size_t cols = 0;
  for (Var p : parts) {
    tape.check(p, "concat_cols");
    if (p.value().rows() != rows) {
      shape_mismatch("concat_cols", parts[0].value().shape(), p.value().shape());
    }
    cols += p.value().cols();
  }
  Tensor out({rows, cols});
  std::size_t offset = 0;
  Tape::Node node;
  node.kind = OpKind::kConcatCols;
  for (Var p : parts) {
    const Tensor& x = p.value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(x.data() + r * x.cols(), x.cols(), out.data() + r * cols + offset);
    }
    offset += x.cols();
    node.inputs.push_back(p.id());
    node.requires_grad = node.requires_grad || tape.node(p.id()).requires_grad;
  }
  node.value = std::move(out);
  return tape.push(std::move(node));
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no operands");
  Tape& tape = tape_of(parts[0], "concat_rows");
  const std::size_t cols = parts[0].value().cols();
  std::size_t rows = 0;
  for (Var p : parts) {
    tape.check(p, "concat_rows");
    if (p.value().cols() != cols) {
      shape_mismatch("concat_rows", parts[0].value().shape(), p.value().shape());
    }
    rows += p.value().rows();
  }
  std::vector<double> values;
  values.reserve(rows * cols);
  Tape::Node node;
  node.kind = OpKind::kConcatRows;
  for (Var p : parts) {
    const auto v = p.value().values();
    values.insert(values.end(), v.begin(), v.end());
    node.inputs.push_back(p.id());
    node.requires_grad = node.requires_grad || tape.node(p.id()).requires_grad;
  }
  node.value = Tensor({rows, cols}, std::move(values));
  return tape.push(std::move(node));
}

Var slice_cols(Var a, std::size_t start, std::size_t count) {
  Tape& tape = tape_of(a, "slice_cols");
  const Tensor& x = a.value();
  if (count == 0 || start + count > x.cols()) {
    throw ShapeError("slice_cols: columns [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") of " + to_string(x.shape()));
  }
  Tensor out({x.rows(), count});
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::copy_n(x.data() + r * x.cols() + start, count, out.data() + r * count);
  }
  return record(tape, OpKind::kSliceCols, {a}, std::move(out), 0.0, start, count);
}

Var slice_rows(Var a, std::size_t start, std::size_t count) {
  Tape& tape = tape_of(a, "slice_rows");
  const Tensor& x = a.value();
  if (count == 0 || start + count > x.rows()) {
    throw ShapeError("slice_rows: rows [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") of " + to_string(x.shape()));
  }
  const std::size_t cols = x.cols();
  std::vector<double> values(x.data() + start * cols, x.data() + (start + count) * cols);
  return record(tape, OpKind::kSliceRows, {a}, Tensor({count, cols}, std::move(values)), 0.0,
                start, count);
}

Var reshape(Var a, Shape shape) {
  Tape& tape = tape_of(a, "reshape");
  if (shape_size(shape) != a.value().size()) {
    shape_mismatch("reshape", a.value().shape(), shape);
  }
  return record(tape, OpKind::kReshape, {a}, a.value().reshaped(std::move(shape)));
}

Var repeat_rows(Var a, std::size_t times) {
  Tape& tape = tape_of(a, "repeat_rows");
  if (times == 0) throw ShapeError("repeat_rows: zero repetitions");
  const Tensor& x = a.value();
  const std::size_t cols = x.cols();
  Tensor out({x.rows() * times, cols});
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t k = 0; k < times; ++k) {
      std::copy_n(x.data() + r * cols, cols, out.data() + (r * times + k) * cols);
    }
  }
  return record(tape, OpKind::kRepeatRows, {a}, std::move(out), 0.0, times);
}

Var batched_vecmat(Var x, Var w, std::size_t m) {
  Tape& tape = tape_of(x, w, "batched_vecmat");
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const std::size_t batch = xv.rows();
  const std::size_t n = xv.cols();
  if (m == 0 || wv.rows() != batch || wv.cols() != n * m) {
    shape_mismatch("batched_vecmat", xv.shape(), wv.shape());
  }
  Tensor out({batch, m});
  for (std::size_t b = 0; b < batch; ++b) {
    const double* xr = xv.data() + b * n;
    const double* wr = wv.data() + b * n * m;
    double* o = out.data() + b * m;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = xr[i];
      const double* wrow = wr + i * m;
      for (std::size_t j = 0; j < m; ++j) o[j] += xi * wrow[j];
    }
  }
  return record(tape, OpKind::kBatchedVecMat, {x, w}, std::move(out), 0.0, m);
}

Var linear(Var x, Var w, Var b) {
  Tape& tape = tape_of(x, w, "linear");
  tape.check(b, "linear");
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  if (xv.cols() != wv.rows()) shape_mismatch("linear", xv.shape(), wv.shape());
  if (bv.rows() != 1 || bv.cols() != wv.cols()) shape_mismatch("linear", wv.shape(), bv.shape());
  Tensor out({xv.rows(), wv.cols()});
  MutMap om(out.data(), xv.rows(), wv.cols());
  om.noalias() = ConstMap(xv.data(), xv.rows(), xv.cols()) * ConstMap(wv.data(), wv.rows(), wv.cols());
  om.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bv.data(), bv.cols());
  Tape::Node node;
  node.kind = OpKind::kLinear;
  node.arity = 2;
  node.in = {x.id(), w.id()};
  node.inputs = {x.id(), w.id(), b.id()};
  for (NodeId id : node.inputs) node.requires_grad = node.requires_grad || tape.node(id).requires_grad;
  node.value = std::move(out);
  return tape.push(std::move(node));
}

Var gru_cell(Var x, Var h, Var w_x, Var w_h, Var b) {
  Tape& tape = tape_of(x, h, "gru_cell");
  for (Var v : {w_x, w_h, b}) tape.check(v, "gru_cell");
  const Tensor& xv = x.value();
  const Tensor& hv = h.value();
  const std::size_t rows = xv.rows();
  const std::size_t hidden = hv.cols();
  if (hv.rows() != rows) shape_mismatch("gru_cell", xv.shape(), hv.shape());
  if (w_x.value().rows() != xv.cols() || w_x.value().cols() != 3 * hidden) {
    shape_mismatch("gru_cell", xv.shape(), w_x.value().shape());
  }
  if (w_h.value().rows() != hidden || w_h.value().cols() != 3 * hidden) {
    shape_mismatch("gru_cell", hv.shape(), w_h.value().shape());
  }
  if (b.value().rows() != 1 || b.value().cols() != 3 * hidden) {
    shape_mismatch("gru_cell", w_x.value().shape(), b.value().shape());
  }
  RowMajor gx = ConstMap(xv.data(), rows, xv.cols()) *
                ConstMap(w_x.value().data(), xv.cols(), 3 * hidden);
  gx.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b.value().data(), 3 * hidden);
  const RowMajor gh = ConstMap(hv.data(), rows, hidden) *
                      ConstMap(w_h.value().data(), hidden, 3 * hidden);

  // aux row layout: z | r | n | h-part of the candidate
  Tensor aux({rows, 4 * hidden});
  Tensor out({rows, hidden});
  auto sig = [](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  };
  for (std::size_t r = 0; r < rows; ++r) {
    double* a = aux.data() + r * 4 * hidden;
    const double* hr = hv.data() + r * hidden;
    for (std::size_t j = 0; j < hidden; ++j) {
      const double z = sig(gx(r, j) + gh(r, j));
      const double rg = sig(gx(r, hidden + j) + gh(r, hidden + j));
      const double ghn = gh(r, 2 * hidden + j);
      const double n = std::tanh(gx(r, 2 * hidden + j) + rg * ghn);
      a[j] = z;
      a[hidden + j] = rg;
      a[2 * hidden + j] = n;
      a[3 * hidden + j] = ghn;
      out[r * hidden + j] = n + z * (hr[j] - n);
    }
  }
  Tape::Node node;
  node.kind = OpKind::kGruCell;
  node.arity = 2;
  node.in = {x.id(), h.id()};
  node.inputs = {x.id(), h.id(), w_x.id(), w_h.id(), b.id()};
  for (NodeId id : node.inputs) node.requires_grad = node.requires_grad || tape.node(id).requires_grad;
  node.value = std::move(out);
  node.aux = std::move(aux);
  return tape.push(std::move(node));
}

Var detach(Var a) {
  Tape& tape = tape_of(a, "detach");
  return tape.constant(a.value());
}

}  // namespace marl::ad
