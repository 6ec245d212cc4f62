#pragma once

#include <memory>

#include "motiongen/lie/kinematics.hpp"
#include "motiongen/nn/tensor.hpp"

namespace motiongen::nn {

// Differentiable forward kinematics: each row of `omega` holds 3N bone
// parameters; the result row holds 3J joint positions with the root at
// the origin. The backward pass runs the analytic reverse sweep of the
// rotation chain, so losses on joint positions reach the Lie parameters.
Tensor fk_offsets(Tensor omega, std::shared_ptr<const lie::Skeleton> skeleton);

}  // namespace motiongen::nn
