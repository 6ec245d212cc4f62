#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace motiongen::nn {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense 2-D real tensor with an optional gradient buffer. Copies share
/// storage, so a Tensor behaves as a handle: parameters held by a model
/// and referenced from tape records are the same object.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols, bool requires_grad = false)
      : s_(std::make_shared<Storage>()) {
    s_->value = Matrix::Zero(rows, cols);
    s_->requires_grad = requires_grad;
  }

  static Tensor from_matrix(Matrix m, bool requires_grad = false) {
    Tensor t;
    t.s_ = std::make_shared<Storage>();
    t.s_->value = std::move(m);
    t.s_->requires_grad = requires_grad;
    return t;
  }

  static Tensor scalar(double v) {
    Tensor t(1, 1);
    t.value()(0, 0) = v;
    return t;
  }

  bool defined() const { return s_ != nullptr; }
  int rows() const { return static_cast<int>(s_->value.rows()); }
  int cols() const { return static_cast<int>(s_->value.cols()); }
  int size() const { return static_cast<int>(s_->value.size()); }

  Matrix& value() { return s_->value; }
  const Matrix& value() const { return s_->value; }
  double item() const { return s_->value(0, 0); }

  bool requires_grad() const { return s_->requires_grad; }
  void set_requires_grad(bool rg) { s_->requires_grad = rg; }

  // Gradient buffer, allocated (zeroed) on first touch.
  Matrix& grad() {
    if (s_->grad.rows() != s_->value.rows() || s_->grad.cols() != s_->value.cols()) {
      s_->grad = Matrix::Zero(s_->value.rows(), s_->value.cols());
    }
    return s_->grad;
  }

  void zero_grad() {
    if (s_) s_->grad = Matrix::Zero(s_->value.rows(), s_->value.cols());
  }

  bool all_finite() const { return s_->value.allFinite(); }

  // Identity of the underlying storage, for aliasing checks in tests.
  const void* id() const { return s_.get(); }

 private:
  struct Storage {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
  };
  std::shared_ptr<Storage> s_;
};

/// Ordered log of differentiable operations. Each record holds the op
/// name, handles to its operands and result, and a closure that pushes
/// the result's gradient into the operands. backward() replays the
/// records exactly once in reverse.
class Tape {
 public:
  struct Record {
    const char* op;
    std::vector<Tensor> inputs;
    Tensor output;
    std::function<void()> backward;
  };

  void push(const char* op, std::vector<Tensor> inputs, Tensor output,
            std::function<void()> backward) {
    records_.push_back({op, std::move(inputs), std::move(output), std::move(backward)});
  }

  // Seeds d(loss)/d(loss) = 1 and runs the reverse sweep. `loss` must be 1x1.
  void backward(Tensor loss);

  size_t size() const { return records_.size(); }
  const Record& record(size_t i) const { return records_[i]; }
  void clear() { records_.clear(); }

 private:
  std::vector<Record> records_;
};

// The tape ops record onto, when one is active on this thread.
Tape* active_tape();

/// Activates a tape for the current scope (thread-local). Ops record a
/// backward closure only while a tape is active and an input requires
/// gradients, so inference outside any scope pays no tape cost.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

}  // namespace motiongen::nn
