#include "motiongen/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace motiongen::nn {

GradCheckReport grad_check(const std::function<Tensor()>& f, std::vector<Tensor> params,
                           double h, int max_coords_per_param, RandomStream& rng) {
  for (Tensor& p : params) p.zero_grad();

  Tape tape;
  {
    TapeScope scope(tape);
    Tensor loss = f();
    tape.backward(loss);
  }
  std::vector<Matrix> analytic;
  analytic.reserve(params.size());
  for (Tensor& p : params) analytic.push_back(p.grad());

  GradCheckReport report;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& p = params[pi];
    std::vector<int> coords;
    if (p.size() <= max_coords_per_param) {
      coords.resize(p.size());
      for (int i = 0; i < p.size(); ++i) coords[i] = i;
    } else {
      std::set<int> picked;
      while (static_cast<int>(picked.size()) < max_coords_per_param) {
        picked.insert(rng.uniform_int(p.size()));
      }
      coords.assign(picked.begin(), picked.end());
    }
    for (int flat : coords) {
      const int r = flat / p.cols();
      const int c = flat % p.cols();
      const double saved = p.value()(r, c);
      p.value()(r, c) = saved + h;
      const double up = f().item();
      p.value()(r, c) = saved - h;
      const double down = f().item();
      p.value()(r, c) = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[pi](r, c);
      const double abs_err = std::abs(a - numeric);
      const double rel_err = abs_err / std::max(1.0, std::abs(a) + std::abs(numeric));
      report.max_abs_error = std::max(report.max_abs_error, abs_err);
      if (rel_err > report.max_rel_error) {
        report.max_rel_error = rel_err;
        report.worst_param = "param " + std::to_string(pi) + " coord " + std::to_string(flat);
      }
      ++report.coords_checked;
    }
  }
  return report;
}

}  // namespace motiongen::nn
