#include "motiongen/nn/gaussian.hpp"

#include "motiongen/common.hpp"

namespace motiongen::nn {

Tensor reparameterize(Tensor mu, Tensor logvar, RandomStream& rng) {
  if (mu.rows() != logvar.rows() || mu.cols() != logvar.cols()) {
    throw ValidationError("reparameterize: mu/logvar shapes disagree");
  }
  Matrix eps_m(mu.rows(), mu.cols());
  for (int r = 0; r < mu.rows(); ++r) {
    for (int c = 0; c < mu.cols(); ++c) eps_m(r, c) = rng.normal();
  }
  Tensor eps = Tensor::from_matrix(std::move(eps_m), false);
  Tensor std_dev = exp(scale(clamp(logvar, kLogVarMin, kLogVarMax), 0.5));
  return add(mu, mul(std_dev, eps));
}

Tensor gaussian_kl(Tensor mu_q, Tensor logvar_q, Tensor mu_p,
                   Tensor logvar_p) {
  if (mu_q.rows() != mu_p.rows() || mu_q.cols() != mu_p.cols() ||
      mu_q.rows() != logvar_q.rows() || mu_q.cols() != logvar_q.cols() ||
      mu_p.rows() != logvar_p.rows() || mu_p.cols() != logvar_p.cols()) {
    throw ValidationError("gaussian_kl: shapes disagree");
  }
  Tensor lq = clamp(logvar_q, kLogVarMin, kLogVarMax);
  Tensor lp = clamp(logvar_p, kLogVarMin, kLogVarMax);
  Tensor d = sub(mu_q, mu_p);
  // 0.5 * sum(lp - lq + (var_q + d^2) / var_p - 1)
  Tensor ratio = mul(add(exp(lq), mul(d, d)), exp(scale(lp, -1.0)));
  Tensor inner = add_scalar(add(sub(lp, lq), ratio), -1.0);
  return scale(sum_all(inner), 0.5);
}

}  // namespace motiongen::nn
