#include "motiongen/nn/layers.hpp"

#include <cmath>

#include "motiongen/common.hpp"

namespace motiongen::nn {

Tensor init_weight(int rows, int cols, int fan_in, RandomStream& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
  }
  return Tensor::from_matrix(std::move(m), true);
}

LinearLayer LinearLayer::init(int in, int out, RandomStream& rng) {
  LinearLayer layer;
  layer.weight = init_weight(out, in, in, rng);
  layer.bias = Tensor(1, out, true);
  return layer;
}

void LinearLayer::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  out.push_back({prefix + ".weight", weight});
  out.push_back({prefix + ".bias", bias});
}

GruCell GruCell::init(int input, int hidden, RandomStream& rng) {
  GruCell cell;
  cell.input_size = input;
  cell.hidden_size = hidden;
  cell.w_z = init_weight(hidden, input, input, rng);
  cell.u_z = init_weight(hidden, hidden, hidden, rng);
  cell.b_z = Tensor(1, hidden, true);
  cell.w_r = init_weight(hidden, input, input, rng);
  cell.u_r = init_weight(hidden, hidden, hidden, rng);
  cell.b_r = Tensor(1, hidden, true);
  cell.w_n = init_weight(hidden, input, input, rng);
  cell.u_n = init_weight(hidden, hidden, hidden, rng);
  cell.b_n = Tensor(1, hidden, true);
  return cell;
}

void GruCell::collect(const std::string& prefix, std::vector<NamedTensor>& out) const {
  out.push_back({prefix + ".w_z", w_z});
  out.push_back({prefix + ".u_z", u_z});
  out.push_back({prefix + ".b_z", b_z});
  out.push_back({prefix + ".w_r", w_r});
  out.push_back({prefix + ".u_r", u_r});
  out.push_back({prefix + ".b_r", b_r});
  out.push_back({prefix + ".w_n", w_n});
  out.push_back({prefix + ".u_n", u_n});
  out.push_back({prefix + ".b_n", b_n});
}

Tensor gru_step(const GruCell& cell, const Tensor& x, const Tensor& h) {
  if (x.cols() != cell.input_size || h.cols() != cell.hidden_size ||
      x.rows() != h.rows()) {
    throw ValidationError("gru_step: input/hidden shapes do not match the cell");
  }
  Tensor z = sigmoid(add(affine(x, cell.w_z, cell.b_z), affine_nb(h, cell.u_z)));
  Tensor r = sigmoid(add(affine(x, cell.w_r, cell.b_r), affine_nb(h, cell.u_r)));
  Tensor n = tanh(add(affine(x, cell.w_n, cell.b_n), affine_nb(mul(r, h), cell.u_n)));
  // (1 - z) * h + z * n, written as h + z * (n - h)
  return add(h, mul(z, sub(n, h)));
}

}  // namespace motiongen::nn
