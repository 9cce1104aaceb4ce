#include <Eigen/Core>
#include <cmath>
#include <string>
#include <utility>

#include "marl/autodiff/tape.h"
#include "marl/common/error.h"

namespace marl::ad {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

class Accumulator {
 public:
  Accumulator(std::vector<Tensor>& grads, const std::deque<Tape::Node>& nodes)
      : grads_(grads), nodes_(nodes) {}

  // Gradient buffer for node `id`, or nullptr when it needs none.
  Tensor* target(NodeId id) {
    const Tape::Node& node = nodes_[id];
    if (!node.requires_grad) return nullptr;
    Tensor& g = grads_[id];
    if (g.empty()) g = Tensor(node.value.shape());
    return &g;
  }

 private:
  std::vector<Tensor>& grads_;
  const std::deque<Tape::Node>& nodes_;
};

// Sum of `g` reduced to the broadcast operand's shape.
void reduce_into(Tensor& dst, const Tensor& g, Broadcast mode, double sign,
                 const Tensor* factor = nullptr) {
  const std::size_t rows = g.rows();
  const std::size_t cols = g.cols();
  auto term = [&](std::size_t i) { return factor ? g[i] * (*factor)[i] : g[i]; };
  switch (mode) {
    case Broadcast::kNone:
      for (std::size_t i = 0; i < g.size(); ++i) dst[i] += sign * term(i);
      break;
    case Broadcast::kScalar: {
      double total = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) total += term(i);
      dst[0] += sign * total;
      break;
    }
    case Broadcast::kRow:
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) dst[c] += sign * term(r * cols + c);
      }
      break;
    case Broadcast::kCol:
      for (std::size_t r = 0; r < rows; ++r) {
        double total = 0.0;
        for (std::size_t c = 0; c < cols; ++c) total += term(r * cols + c);
        dst[r] += sign * total;
      }
      break;
  }
}

double broadcast_at(const Tensor& b, Broadcast mode, std::size_t r, std::size_t c,
                    std::size_t cols) {
  switch (mode) {
    case Broadcast::kNone: return b[r * cols + c];
    case Broadcast::kScalar: return b[0];
    case Broadcast::kRow: return b[c];
    case Broadcast::kCol: return b[r];
  }
  return 0.0;
}

}  // namespace

Gradients Tape::backward(Var loss) const {
  check(loss, "backward");
  const Node& root = nodes_[loss.id()];
  if (root.value.size() != 1) {
    throw Error("backward: loss must be a scalar, got shape " + to_string(root.value.shape()));
  }
  if (!root.requires_grad) {
    throw Error("backward: loss is detached from every differentiable input");
  }

  std::vector<Tensor> grads(nodes_.size());
  grads[loss.id()] = Tensor(root.value.shape(), 1.0);
  Accumulator acc(grads, nodes_);

  for (std::size_t k = loss.id() + 1; k-- > 0;) {
    const Node& node = nodes_[k];
    if (grads[k].empty() || !node.requires_grad) continue;
    if (node.kind == OpKind::kLeaf) continue;
    const Tensor g = std::move(grads[k]);
    grads[k] = Tensor();
    const Tensor& out = node.value;
    const std::size_t rows = g.rows();
    const std::size_t cols = g.cols();

    switch (node.kind) {
      case OpKind::kLeaf:
      case OpKind::kConstant:
        break;
      case OpKind::kMatMul: {
        const Tensor& a = nodes_[node.in[0]].value;
        const Tensor& b = nodes_[node.in[1]].value;
        const ConstMap gm(g.data(), rows, cols);
        if (Tensor* da = acc.target(node.in[0])) {
          MutMap(da->data(), a.rows(), a.cols()).noalias() +=
              gm * ConstMap(b.data(), b.rows(), b.cols()).transpose();
        }
        if (Tensor* db = acc.target(node.in[1])) {
          MutMap(db->data(), b.rows(), b.cols()).noalias() +=
              ConstMap(a.data(), a.rows(), a.cols()).transpose() * gm;
        }
        break;
      }
      case OpKind::kAdd:
      case OpKind::kSub: {
        const auto mode = static_cast<Broadcast>(node.p0);
        if (Tensor* da = acc.target(node.in[0])) {
          for (std::size_t i = 0; i < g.size(); ++i) (*da)[i] += g[i];
        }
        if (Tensor* db = acc.target(node.in[1])) {
          reduce_into(*db, g, mode, node.kind == OpKind::kAdd ? 1.0 : -1.0);
        }
        break;
      }
      case OpKind::kMul: {
        const auto mode = static_cast<Broadcast>(node.p0);
        const Tensor& a = nodes_[node.in[0]].value;
        const Tensor& b = nodes_[node.in[1]].value;
        if (Tensor* da = acc.target(node.in[0])) {
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
              (*da)[r * cols + c] += g[r * cols + c] * broadcast_at(b, mode, r, c, cols);
            }
          }
        }
        if (Tensor* db = acc.target(node.in[1])) reduce_into(*db, g, mode, 1.0, &a);
        break;
      }
      case OpKind::kScale: {
        if (Tensor* da = acc.target(node.in[0])) {
          for (std::size_t i = 0; i < g.size(); ++i) (*da)[i] += node.scalar * g[i];
        }
        break;
      }
      case OpKind::kRelu:
      case OpKind::kElu:
      case OpKind::kTanh:
      case OpKind::kSigmoid:
      case OpKind::kAbs:
      case OpKind::kSquare: {
        Tensor* da = acc.target(node.in[0]);
        if (!da) break;
        const Tensor& x = nodes_[node.in[0]].value;
        for (std::size_t i = 0; i < g.size(); ++i) {
          double d = 0.0;
          switch (node.kind) {
            case OpKind::kRelu: d = x[i] > 0.0 ? 1.0 : 0.0; break;
            case OpKind::kElu: d = x[i] > 0.0 ? 1.0 : out[i] + 1.0; break;
            case OpKind::kTanh: d = 1.0 - out[i] * out[i]; break;
            case OpKind::kSigmoid: d = out[i] * (1.0 - out[i]); break;
            case OpKind::kAbs: d = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0); break;
            default: d = 2.0 * x[i]; break;
          }
          (*da)[i] += g[i] * d;
        }
        break;
      }
      case OpKind::kSoftmax: {
        Tensor* da = acc.target(node.in[0]);
        if (!da) break;
        for (std::size_t r = 0; r < rows; ++r) {
          double dot = 0.0;
          for (std::size_t c = 0; c < cols; ++c) dot += g[r * cols + c] * out[r * cols + c];
          for (std::size_t c = 0; c < cols; ++c) {
            (*da)[r * cols + c] += out[r * cols + c] * (g[r * cols + c] - dot);
          }
        }
        break;
      }
      case OpKind::kLogSoftmax: {
        Tensor* da = acc.target(node.in[0]);
        if (!da) break;
        for (std::size_t r = 0; r < rows; ++r) {
          double total = 0.0;
          for (std::size_t c = 0; c < cols; ++c) total += g[r * cols + c];
          for (std::size_t c = 0; c < cols; ++c) {
            (*da)[r * cols + c] += g[r * cols + c] - std::exp(out[r * cols + c]) * total;
          }
        }
        break;
      }
      case OpKind::kSum:
      case OpKind::kMean: {
        Tensor* da = acc.target(node.in[0]);
        if (!da) break;
        const double v = node.kind == OpKind::kSum
                             ? g[0]
                             : g[0] / static_cast<double>(da->size());
        for (double& x : da->values()) x += v;
        break;
      }
      case OpKind::kSumRows: {
        Tensor* da = acc.target(node.in[0]);
        if (!da) break;
        const std::size_t in_cols = da->cols();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < in_cols; ++c) (*da)[r * in_cols + c] += g[r];
        }
        break;
      }
      case OpKind::kGather:
      case OpKind::kRowMax: {
        Tensor* da = acc.target(node.in[0]);
        if (!da) break;
        const std::size_t in_cols = da->cols();
        for (std::size_t r = 0; r < rows; ++r) (*da)[r * in_cols + node.index[r]] += g[r];
        break;
      }
      case OpKind::kConcatCols: {
        std::size_t offset = 0;
        for (NodeId id : node.inputs) {
          const std::size_t part_cols = nodes_[id].value.cols();
          if (Tensor* dp = acc.target(id)) {
            for (std::size_t r = 0; r < rows; ++r) {
              for (std::size_t c = 0; c < part_cols; ++c) {
                (*dp)[r * part_cols + c] += g[r * cols + offset + c];
              }
            }
          }
          offset += part_cols;
        }
        break;
      }
      case OpKind::kConcatRows: {
        std::size_t offset = 0;
        for (NodeId id : node.inputs) {
          const std::size_t n = nodes_[id].value.size();
          if (Tensor* dp = acc.target(id)) {
            for (std::size_t i = 0; i < n; ++i) (*dp)[i] += g[offset + i];
          }
          offset += n;
        }
        break;
      }
      case OpKind::kSliceCols: {
        Tensor* da = acc.target(node.in[0]);
        if (!da) break;
        const std::size_t in_cols = da->cols();
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) (*da)[r * in_cols + node.p0 + c] += g[r * cols + c];
        }
        break;
      }
      case OpKind::kSliceRows: {
        Tensor* da = acc.target(node.in[0]);
        if (!da) break;
        double* base = da->data() + node.p0 * cols;
        for (std::size_t i = 0; i < g.size(); ++i) base[i] += g[i];
        break;
      }
      case OpKind::kReshape: {
        Tensor* da = acc.target(node.in[0]);
        if (!da) break;
        for (std::size_t i = 0; i < g.size(); ++i) (*da)[i] += g[i];
        break;
      }
      case OpKind::kRepeatRows: {
        Tensor* da = acc.target(node.in[0]);
        if (!da) break;
        const std::size_t times = node.p0;
        for (std::size_t r = 0; r < da->rows(); ++r) {
          for (std::size_t k = 0; k < times; ++k) {
            const double* src = g.data() + (r * times + k) * cols;
            for (std::size_t c = 0; c < cols; ++c) (*da)[r * cols + c] += src[c];
          }
        }
        break;
      }
      case OpKind::kBatchedVecMat: {
        const Tensor& x = nodes_[node.in[0]].value;
        const Tensor& w = nodes_[node.in[1]].value;
        const std::size_t n = x.cols();
        const std::size_t m = node.p0;
        Tensor* dx = acc.target(node.in[0]);
        Tensor* dw = acc.target(node.in[1]);
        for (std::size_t b = 0; b < rows; ++b) {
          const double* gr = g.data() + b * m;
          for (std::size_t i = 0; i < n; ++i) {
            const double* wrow = w.data() + (b * n + i) * m;
            if (dx) {
              double total = 0.0;
              for (std::size_t j = 0; j < m; ++j) total += gr[j] * wrow[j];
              (*dx)[b * n + i] += total;
            }
            if (dw) {
              double* dwrow = dw->data() + (b * n + i) * m;
              const double xi = x[b * n + i];
              for (std::size_t j = 0; j < m; ++j) dwrow[j] += xi * gr[j];
            }
          }
        }
        break;
      }
      case OpKind::kLinear: {
        const Tensor& x = nodes_[node.inputs[0]].value;
        const Tensor& w = nodes_[node.inputs[1]].value;
        const ConstMap gm(g.data(), rows, cols);
        if (Tensor* dx = acc.target(node.inputs[0])) {
          MutMap(dx->data(), x.rows(), x.cols()).noalias() +=
              gm * ConstMap(w.data(), w.rows(), w.cols()).transpose();
        }
        if (Tensor* dw = acc.target(node.inputs[1])) {
          MutMap(dw->data(), w.rows(), w.cols()).noalias() +=
              ConstMap(x.data(), x.rows(), x.cols()).transpose() * gm;
        }
        if (Tensor* db = acc.target(node.inputs[2])) reduce_into(*db, g, Broadcast::kRow, 1.0);
        break;
      }
      case OpKind::kGruCell: {
        const Tensor& x = nodes_[node.inputs[0]].value;
        const Tensor& h = nodes_[node.inputs[1]].value;
        const Tensor& w_x = nodes_[node.inputs[2]].value;
        const Tensor& w_h = nodes_[node.inputs[3]].value;
        const std::size_t hidden = cols;
        RowMajor dgx(rows, 3 * hidden);
        RowMajor dgh(rows, 3 * hidden);
        Tensor* dh = acc.target(node.inputs[1]);
        for (std::size_t r = 0; r < rows; ++r) {
          const double* a = node.aux.data() + r * 4 * hidden;
          const double* hr = h.data() + r * hidden;
          const double* gr = g.data() + r * hidden;
          for (std::size_t j = 0; j < hidden; ++j) {
            const double z = a[j];
            const double rg = a[hidden + j];
            const double n = a[2 * hidden + j];
            const double ghn = a[3 * hidden + j];
            const double dz = gr[j] * (hr[j] - n) * z * (1.0 - z);
            const double dn = gr[j] * (1.0 - z) * (1.0 - n * n);
            const double dr = dn * ghn * rg * (1.0 - rg);
            dgx(r, j) = dz;
            dgx(r, hidden + j) = dr;
            dgx(r, 2 * hidden + j) = dn;
            dgh(r, j) = dz;
            dgh(r, hidden + j) = dr;
            dgh(r, 2 * hidden + j) = dn * rg;
            if (dh) (*dh)[r * hidden + j] += gr[j] * z;
          }
        }
        if (Tensor* dx = acc.target(node.inputs[0])) {
          MutMap(dx->data(), x.rows(), x.cols()).noalias() +=
              dgx * ConstMap(w_x.data(), w_x.rows(), w_x.cols()).transpose();
        }
        if (dh) {
          MutMap(dh->data(), rows, hidden).noalias() +=
              dgh * ConstMap(w_h.data(), w_h.rows(), w_h.cols()).transpose();
        }
        if (Tensor* dwx = acc.target(node.inputs[2])) {
          MutMap(dwx->data(), w_x.rows(), w_x.cols()).noalias() +=
              ConstMap(x.data(), x.rows(), x.cols()).transpose() * dgx;
        }
        if (Tensor* dwh = acc.target(node.inputs[3])) {
          MutMap(dwh->data(), w_h.rows(), w_h.cols()).noalias() +=
              ConstMap(h.data(), rows, hidden).transpose() * dgh;
        }
        if (Tensor* db = acc.target(node.inputs[4])) {
          MutMap(db->data(), 1, 3 * hidden) += dgx.colwise().sum();
        }
        break;
      }
    }
  }

  Gradients result;
  result.tape_ = this;
  result.generation_ = generation_;
  for (std::size_t k = 0; k < nodes_.size(); ++k) {
    if (nodes_[k].kind != OpKind::kLeaf && nodes_[k].kind != OpKind::kConstant) grads[k] = Tensor();
  }
  result.grads_ = std::move(grads);
  return result;
}

}  // namespace marl::ad
