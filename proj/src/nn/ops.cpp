#include "motiongen/nn/ops.hpp"

#include <cmath>

#include "motiongen/common.hpp"

namespace motiongen::nn {

namespace {

Tensor make_output(Matrix m, bool requires_grad) {
  return Tensor::from_matrix(std::move(m), requires_grad);
}

bool should_record(bool requires_grad) {
  return requires_grad && active_tape() != nullptr;
}

void check_same_shape(Tensor a, Tensor b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError(std::string(op) + ": shape mismatch (" +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                          " vs " + std::to_string(b.rows()) + "x" +
                          std::to_string(b.cols()) + ")");
  }
}

}  // namespace

Tensor matmul(Tensor a, Tensor b) {
  if (a.cols() != b.rows()) {
    throw ValidationError("matmul: inner dimensions disagree (" +
                          std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + ")");
  }
  const bool rg = a.requires_grad() || b.requires_grad();
  Tensor out = make_output(a.value() * b.value(), rg);
  if (should_record(rg)) {
    active_tape()->push("matmul", {a, b}, out, [a, b, out]() mutable {
      if (a.requires_grad()) a.grad() += out.grad() * b.value().transpose();
      if (b.requires_grad()) b.grad() += a.value().transpose() * out.grad();
    });
  }
  return out;
}

Tensor add(Tensor a, Tensor b) {
  const bool broadcast = b.rows() == 1 && a.rows() != 1 && a.cols() == b.cols();
  if (!broadcast) check_same_shape(a, b, "add");
  const bool rg = a.requires_grad() || b.requires_grad();
  Matrix m = broadcast ? Matrix(a.value().rowwise() + b.value().row(0))
                       : Matrix(a.value() + b.value());
  Tensor out = make_output(std::move(m), rg);
  if (should_record(rg)) {
    active_tape()->push("add", {a, b}, out, [a, b, out, broadcast]() mutable {
      if (a.requires_grad()) a.grad() += out.grad();
      if (b.requires_grad()) {
        if (broadcast) {
          b.grad().row(0) += out.grad().colwise().sum();
        } else {
          b.grad() += out.grad();
        }
      }
    });
  }
  return out;
}

Tensor sub(Tensor a, Tensor b) {
  check_same_shape(a, b, "sub");
  const bool rg = a.requires_grad() || b.requires_grad();
  Tensor out = make_output(a.value() - b.value(), rg);
  if (should_record(rg)) {
    active_tape()->push("sub", {a, b}, out, [a, b, out]() mutable {
      if (a.requires_grad()) a.grad() += out.grad();
      if (b.requires_grad()) b.grad() -= out.grad();
    });
  }
  return out;
}

Tensor mul(Tensor a, Tensor b) {
  check_same_shape(a, b, "mul");
  const bool rg = a.requires_grad() || b.requires_grad();
  Tensor out = make_output(a.value().cwiseProduct(b.value()), rg);
  if (should_record(rg)) {
    active_tape()->push("mul", {a, b}, out, [a, b, out]() mutable {
      if (a.requires_grad()) a.grad() += out.grad().cwiseProduct(b.value());
      if (b.requires_grad()) b.grad() += out.grad().cwiseProduct(a.value());
    });
  }
  return out;
}

Tensor scale(Tensor a, double s) {
  const bool rg = a.requires_grad();
  Tensor out = make_output(a.value() * s, rg);
  if (should_record(rg)) {
    active_tape()->push("scale", {a}, out, [a, out, s]() mutable {
      a.grad() += out.grad() * s;
    });
  }
  return out;
}

Tensor add_scalar(Tensor a, double s) {
  const bool rg = a.requires_grad();
  Tensor out = make_output(Matrix(a.value().array() + s), rg);
  if (should_record(rg)) {
    active_tape()->push("add_scalar", {a}, out, [a, out]() mutable {
      a.grad() += out.grad();
    });
  }
  return out;
}

Tensor transpose(Tensor a) {
  const bool rg = a.requires_grad();
  Tensor out = make_output(a.value().transpose(), rg);
  if (should_record(rg)) {
    active_tape()->push("transpose", {a}, out, [a, out]() mutable {
      a.grad() += out.grad().transpose();
    });
  }
  return out;
}

Tensor concat(Tensor a, Tensor b) { return concat(std::vector<Tensor>{a, b}); }

Tensor concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ValidationError("concat: no inputs");
  const int rows = parts[0].rows();
  int cols = 0;
  bool rg = false;
  for (Tensor p : parts) {
    if (p.rows() != rows) throw ValidationError("concat: row counts disagree");
    cols += p.cols();
    rg = rg || p.requires_grad();
  }
  Matrix m(rows, cols);
  int at = 0;
  for (Tensor p : parts) {
    m.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  Tensor out = make_output(std::move(m), rg);
  if (should_record(rg)) {
    std::vector<Tensor> inputs = parts;
    active_tape()->push("concat", inputs, out, [inputs, out]() mutable {
      int at = 0;
      for (Tensor& p : inputs) {
        if (p.requires_grad()) p.grad() += out.grad().middleCols(at, p.cols());
        at += p.cols();
      }
    });
  }
  return out;
}

Tensor slice_cols(Tensor a, int begin, int len) {
  if (begin < 0 || len < 0 || begin + len > a.cols()) {
    throw ValidationError("slice_cols: range [" + std::to_string(begin) + ", " +
                          std::to_string(begin + len) + ") exceeds " +
                          std::to_string(a.cols()) + " columns");
  }
  const bool rg = a.requires_grad();
  Tensor out = make_output(a.value().middleCols(begin, len), rg);
  if (should_record(rg)) {
    active_tape()->push("slice_cols", {a}, out, [a, out, begin, len]() mutable {
      a.grad().middleCols(begin, len) += out.grad();
    });
  }
  return out;
}

Tensor embed_cols(Tensor a, int total_cols, int offset) {
  if (offset < 0 || offset + a.cols() > total_cols) {
    throw ValidationError("embed_cols: slice does not fit");
  }
  const bool rg = a.requires_grad();
  Matrix m = Matrix::Zero(a.rows(), total_cols);
  m.middleCols(offset, a.cols()) = a.value();
  Tensor out = make_output(std::move(m), rg);
  if (should_record(rg)) {
    active_tape()->push("embed_cols", {a}, out, [a, out, offset]() mutable {
      a.grad() += out.grad().middleCols(offset, a.cols());
    });
  }
  return out;
}

Tensor tanh(Tensor a) {
  const bool rg = a.requires_grad();
  Tensor out = make_output(Matrix(a.value().array().tanh()), rg);
  if (should_record(rg)) {
    active_tape()->push("tanh", {a}, out, [a, out]() mutable {
      a.grad() += out.grad().cwiseProduct(
          Matrix(1.0 - out.value().array().square()));
    });
  }
  return out;
}

Tensor sigmoid(Tensor a) {
  const bool rg = a.requires_grad();
  Tensor out = make_output(Matrix(1.0 / (1.0 + (-a.value().array()).exp())), rg);
  if (should_record(rg)) {
    active_tape()->push("sigmoid", {a}, out, [a, out]() mutable {
      a.grad() += out.grad().cwiseProduct(
          Matrix(out.value().array() * (1.0 - out.value().array())));
    });
  }
  return out;
}

Tensor exp(Tensor a) {
  const bool rg = a.requires_grad();
  Tensor out = make_output(Matrix(a.value().array().exp()), rg);
  if (should_record(rg)) {
    active_tape()->push("exp", {a}, out, [a, out]() mutable {
      a.grad() += out.grad().cwiseProduct(out.value());
    });
  }
  return out;
}

Tensor clamp(Tensor a, double lo, double hi) {
  const bool rg = a.requires_grad();
  Tensor out = make_output(Matrix(a.value().array().max(lo).min(hi)), rg);
  if (should_record(rg)) {
    active_tape()->push("clamp", {a}, out, [a, out, lo, hi]() mutable {
      const auto mask = (a.value().array() >= lo && a.value().array() <= hi)
                            .cast<double>();
      a.grad() += out.grad().cwiseProduct(Matrix(mask));
    });
  }
  return out;
}

Tensor sum_all(Tensor a) {
  const bool rg = a.requires_grad();
  Tensor out = Tensor::scalar(a.value().sum());
  out.set_requires_grad(rg);
  if (should_record(rg)) {
    active_tape()->push("sum_all", {a}, out, [a, out]() mutable {
      a.grad().array() += out.grad()(0, 0);
    });
  }
  return out;
}

Tensor mean_all(Tensor a) {
  const bool rg = a.requires_grad();
  Tensor out = Tensor::scalar(a.value().mean());
  out.set_requires_grad(rg);
  if (should_record(rg)) {
    const double inv = 1.0 / static_cast<double>(a.size());
    active_tape()->push("mean_all", {a}, out, [a, out, inv]() mutable {
      a.grad().array() += out.grad()(0, 0) * inv;
    });
  }
  return out;
}

Tensor affine(Tensor x, Tensor weight, Tensor bias) {
  if (x.cols() != weight.cols()) {
    throw ValidationError("affine: input width " + std::to_string(x.cols()) +
                          " does not match weight fan-in " + std::to_string(weight.cols()));
  }
  if (bias.rows() != 1 || bias.cols() != weight.rows()) {
    throw ValidationError("affine: bias shape does not match weight fan-out");
  }
  const bool rg = x.requires_grad() || weight.requires_grad() || bias.requires_grad();
  Matrix m = x.value() * weight.value().transpose();
  m.rowwise() += bias.value().row(0);
  Tensor out = make_output(std::move(m), rg);
  if (should_record(rg)) {
    active_tape()->push("affine", {x, weight, bias}, out, [x, weight, bias, out]() mutable {
      if (x.requires_grad()) x.grad() += out.grad() * weight.value();
      if (weight.requires_grad()) weight.grad() += out.grad().transpose() * x.value();
      if (bias.requires_grad()) bias.grad().row(0) += out.grad().colwise().sum();
    });
  }
  return out;
}

Tensor affine_nb(Tensor x, Tensor weight) {
  if (x.cols() != weight.cols()) {
    throw ValidationError("affine_nb: input width does not match weight fan-in");
  }
  const bool rg = x.requires_grad() || weight.requires_grad();
  Tensor out = make_output(x.value() * weight.value().transpose(), rg);
  if (should_record(rg)) {
    active_tape()->push("affine_nb", {x, weight}, out, [x, weight, out]() mutable {
      if (x.requires_grad()) x.grad() += out.grad() * weight.value();
      if (weight.requires_grad()) weight.grad() += out.grad().transpose() * x.value();
    });
  }
  return out;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (int r = 0; r < logits.rows(); ++r) {
    const double m = logits.row(r).maxCoeff();
    Eigen::ArrayXd e = (logits.row(r).array() - m).exp();
    out.row(r) = (e / e.sum()).matrix();
  }
  return out;
}

Tensor softmax_cross_entropy(Tensor logits, const std::vector<int>& labels) {
  if (static_cast<int>(labels.size()) != logits.rows()) {
    throw ValidationError("softmax_cross_entropy: one label per row required");
  }
  for (int label : labels) {
    if (label < 0 || label >= logits.cols()) {
      throw ValidationError("softmax_cross_entropy: label out of range");
    }
  }
  const Matrix probs = softmax_rows(logits.value());
  double loss = 0.0;
  for (int r = 0; r < logits.rows(); ++r) {
    loss -= std::log(std::max(probs(r, labels[r]), 1e-300));
  }
  loss /= static_cast<double>(logits.rows());
  const bool rg = logits.requires_grad();
  Tensor out = Tensor::scalar(loss);
  out.set_requires_grad(rg);
  if (should_record(rg)) {
    active_tape()->push("softmax_ce", {logits}, out, [logits, out, probs, labels]() mutable {
      Matrix g = probs;
      for (size_t r = 0; r < labels.size(); ++r) g(static_cast<int>(r), labels[r]) -= 1.0;
      g /= static_cast<double>(labels.size());
      logits.grad() += out.grad()(0, 0) * g;
    });
  }
  return out;
}

Tensor squared_error(Tensor a, Tensor b) {
  Tensor d = sub(a, b);
  return sum_all(mul(d, d));
}

}  // namespace motiongen::nn
