#pragma once

#include <vector>

#include "motiongen/nn/tensor.hpp"

namespace motiongen::nn {

struct AdamConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-5;  // classic L2: added to the gradient
};

/// First and second moment accumulators per parameter plus the step count.
struct AdamState {
  AdamConfig config;
  long step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;

  static AdamState init(const std::vector<Tensor>& params, const AdamConfig& config);
};

// One bias-corrected Adam update, reading params[i].grad() and writing
// params[i].value(). Weight decay enters as an additive gradient term.
void adam_step(std::vector<Tensor>& params, AdamState& state);

}  // namespace motiongen::nn
