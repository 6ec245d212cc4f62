#include "motiongen/nn/adam.hpp"

#include <cmath>

#include "motiongen/common.hpp"

namespace motiongen::nn {

AdamState AdamState::init(const std::vector<Tensor>& params, const AdamConfig& config) {
  AdamState state;
  state.config = config;
  state.m.reserve(params.size());
  state.v.reserve(params.size());
  for (const Tensor& p : params) {
    state.m.push_back(Matrix::Zero(p.rows(), p.cols()));
    state.v.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
  return state;
}

void adam_step(std::vector<Tensor>& params, AdamState& state) {
  if (params.size() != state.m.size()) {
    throw ValidationError("adam_step: state does not match parameter list");
  }
  const AdamConfig& c = state.config;
  state.step += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    Matrix g = p.grad();
    if (c.weight_decay != 0.0) g += c.weight_decay * p.value();
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g.cwiseProduct(g);
    const Matrix m_hat = state.m[i] / bc1;
    const Matrix v_hat = state.v[i] / bc2;
    p.value().array() -=
        c.learning_rate * m_hat.array() / (v_hat.array().sqrt() + c.epsilon);
  }
}

}  // namespace motiongen::nn
