#pragma once

#include <functional>
#include <string>
#include <vector>

#include "motiongen/nn/random.hpp"
#include "motiongen/nn/tensor.hpp"

namespace motiongen::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  int coords_checked = 0;
  std::string worst_param;
};

// Compares the tape gradient of `f` (a deterministic scalar-valued
// function of `params`) against central finite differences with step `h`.
// Checks every coordinate when a parameter has at most
// `max_coords_per_param` entries, otherwise a random subset drawn from
// `rng`. Relative error uses max(1, |analytic| + |numeric|) in the
// denominator.
GradCheckReport grad_check(const std::function<Tensor()>& f, std::vector<Tensor> params,
                           double h, int max_coords_per_param, RandomStream& rng);

}  // namespace motiongen::nn
