#include "motiongen/nn/tensor.hpp"

#include "motiongen/common.hpp"

namespace motiongen::nn {

namespace {
thread_local Tape* g_active_tape = nullptr;
}

Tape* active_tape() { return g_active_tape; }

TapeScope::TapeScope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }

TapeScope::~TapeScope() { g_active_tape = previous_; }

void Tape::backward(Tensor loss) {
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw ValidationError("backward() needs a scalar loss tensor");
  }
  loss.grad()(0, 0) += 1.0;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    if (it->backward) it->backward();
  }
}

}  // namespace motiongen::nn
