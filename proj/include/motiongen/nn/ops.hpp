#pragma once

#include <vector>

#include "motiongen/nn/tensor.hpp"

namespace motiongen::nn {

// Dense tensor operations. Every op propagates requires_grad from its
// inputs and, when a tape is active, records a closure that accumulates
// the output gradient into the input gradients.

Tensor matmul(Tensor a, Tensor b);

// Elementwise add; `b` may also be a 1xC row vector broadcast over rows.
Tensor add(Tensor a, Tensor b);
Tensor sub(Tensor a, Tensor b);

// Elementwise (Hadamard) product of same-shape tensors.
Tensor mul(Tensor a, Tensor b);

Tensor scale(Tensor a, double s);
Tensor add_scalar(Tensor a, double s);

Tensor transpose(Tensor a);

// Horizontal concatenation (rows must match).
Tensor concat(Tensor a, Tensor b);
Tensor concat(const std::vector<Tensor>& parts);

// Columns [begin, begin+len) of `a`.
Tensor slice_cols(Tensor a, int begin, int len);

// Places `a` into a zero tensor of `total_cols` columns at `offset`.
Tensor embed_cols(Tensor a, int total_cols, int offset);

Tensor tanh(Tensor a);
Tensor sigmoid(Tensor a);
Tensor exp(Tensor a);

// Clamps values to [lo, hi]; gradient passes through unclamped entries.
Tensor clamp(Tensor a, double lo, double hi);

Tensor sum_all(Tensor a);   // 1x1
Tensor mean_all(Tensor a);  // 1x1

// Fused y = x * W^T + b with W (out x in) and b (1 x out).
Tensor affine(Tensor x, Tensor weight, Tensor bias);
// Same without bias.
Tensor affine_nb(Tensor x, Tensor weight);

// Mean over rows of -log softmax(logits)[label]; labels size == rows.
Tensor softmax_cross_entropy(Tensor logits, const std::vector<int>& labels);

// Row-wise softmax of plain values (no tape), for probability readouts.
Matrix softmax_rows(const Matrix& logits);

// Sum of squared entries of (a - b); the reconstruction penalty.
Tensor squared_error(Tensor a, Tensor b);

}  // namespace motiongen::nn
