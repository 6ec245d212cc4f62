#pragma once

#include "motiongen/nn/ops.hpp"
#include "motiongen/nn/random.hpp"

namespace motiongen::nn {

// Log-variances are clamped to this range before exponentiation,
// everywhere they are consumed.
constexpr double kLogVarMin = -10.0;
constexpr double kLogVarMax = 10.0;

// z = mu + exp(logvar / 2) * eps with eps ~ N(0, I) drawn from `rng`.
// Gradients flow into mu and logvar; eps is a constant.
Tensor reparameterize(Tensor mu, Tensor logvar, RandomStream& rng);

// Closed-form KL divergence between diagonal Gaussians q and p given as
// (mean, log-variance) pairs, summed over all entries. Non-negative and
// differentiable in all four inputs.
Tensor gaussian_kl(Tensor mu_q, Tensor logvar_q, Tensor mu_p,
                   Tensor logvar_p);

}  // namespace motiongen::nn
