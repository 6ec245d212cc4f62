#pragma once

#include <string>
#include <vector>

#include "motiongen/nn/ops.hpp"
#include "motiongen/nn/random.hpp"
#include "motiongen/nn/tensor.hpp"

namespace motiongen::nn {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

/// Fully connected layer, weight (out x in), bias (1 x out).
struct LinearLayer {
  Tensor weight;
  Tensor bias;

  static LinearLayer init(int in, int out, RandomStream& rng);
  Tensor forward(const Tensor& x) const { return affine(x, weight, bias); }
  void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

/// Gated recurrent cell with one bias per gate:
///   z = sigmoid(Wz x + Uz h + bz)
///   r = sigmoid(Wr x + Ur h + br)
///   n = tanh(Wn x + Un (r * h) + bn)
///   h' = (1 - z) * h + z * n
struct GruCell {
  int input_size = 0;
  int hidden_size = 0;
  Tensor w_z, u_z, b_z;
  Tensor w_r, u_r, b_r;
  Tensor w_n, u_n, b_n;

  static GruCell init(int input, int hidden, RandomStream& rng);
  void collect(const std::string& prefix, std::vector<NamedTensor>& out) const;
};

// One recurrence step; x is (B x input), h is (B x hidden), returns the
// next hidden state. Differentiable through both arguments and all
// parameters.
Tensor gru_step(const GruCell& cell, const Tensor& x, const Tensor& h);

// Uniform init in +-1/sqrt(fan_in), the conventional default for these cells.
Tensor init_weight(int rows, int cols, int fan_in, RandomStream& rng);

}  // namespace motiongen::nn
