#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "marl/autodiff/tape.h"

// Differentiable primitives. Every op takes operands from one tape and
// records its result there. Operands are rank-2 unless noted; rank 0/1
// values are viewed as a single row.
namespace marl::ad {

Var matmul(Var a, Var b);  // [m,k] x [k,n] -> [m,n]

// Elementwise with broadcasting of `b`: same shape, a [1,n] row, an [m,1]
// column, or a single element.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);

Var relu(Var a);     // derivative 0 at 0
Var elu(Var a);      // alpha = 1
Var tanh(Var a);
Var sigmoid(Var a);
Var abs(Var a);      // subgradient 0 at 0
Var square(Var a);

Var softmax(Var a);      // over the last axis
Var log_softmax(Var a);  // over the last axis

Var sum(Var a);       // -> [1,1]
Var mean(Var a);      // -> [1,1]
Var sum_rows(Var a);  // [m,n] -> [m,1]
Var row_max(Var a);   // [m,n] -> [m,1]; gradient flows to the first maximum

// out[r] = a[r, index[r]]  -> [m,1]
Var gather(Var a, std::span<const std::size_t> index);

Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var slice_cols(Var a, std::size_t start, std::size_t count);
Var slice_rows(Var a, std::size_t start, std::size_t count);
Var reshape(Var a, Shape shape);
// Each row repeated `times` times consecutively: [m,n] -> [m*times, n].
Var repeat_rows(Var a, std::size_t times);

// Per-row vector-matrix product with row-specific matrices:
// x [B,n], w [B, n*m] (row b holds an n x m matrix, row-major) -> [B,m].
Var batched_vecmat(Var x, Var w, std::size_t m);

// x [B,in] . w [in,out] + b [1,out]
Var linear(Var x, Var w, Var b);

// Gated recurrent unit step. w_x [I,3H] and w_h [H,3H] hold the update,
// reset and candidate gates side by side; b [1,3H] is added to the input
// half. z = sigmoid(.), r = sigmoid(.), n = tanh(x-part + r * h-part),
// h' = (1 - z) * n + z * h.
Var gru_cell(Var x, Var h, Var w_x, Var w_h, Var b);

// Copy of `a` recorded as a constant: blocks gradient flow.
Var detach(Var a);

}  // namespace marl::ad
