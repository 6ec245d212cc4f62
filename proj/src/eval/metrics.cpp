#include "motiongen/eval/metrics.hpp"

#include <cmath>

#include "motiongen/common.hpp"

namespace motiongen::eval {

GaussianStats fit_gaussian(const Eigen::MatrixXd& features) {
  const int n = static_cast<int>(features.rows());
  if (n < 2) throw ValidationError("need at least two feature vectors for a Gaussian fit");
  GaussianStats stats;
  stats.mean = features.colwise().mean();
  const Eigen::MatrixXd centered = features.rowwise() - stats.mean.transpose();
  stats.cov = centered.transpose() * centered / static_cast<double>(n - 1);
  return stats;
}

namespace {

// Symmetric PSD square root via eigendecomposition with negative
// eigenvalues clamped to zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (m + m.transpose()));
  Eigen::VectorXd vals = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * vals.asDiagonal() * solver.eigenvectors().transpose();
}

std::vector<int> sample_subset(int pool, int size, nn::RandomStream& rng) {
  std::vector<int> out(size);
  if (pool >= size) {
    std::vector<int> order(pool);
    for (int i = 0; i < pool; ++i) order[i] = i;
    rng.shuffle(order);
    for (int i = 0; i < size; ++i) out[i] = order[i];
  } else {
    for (int i = 0; i < size; ++i) out[i] = rng.uniform_int(pool);
  }
  return out;
}

}  // namespace

double fid(const GaussianStats& a, const GaussianStats& b) {
  if (a.mean.size() != b.mean.size()) {
    throw ValidationError("fid: feature dimensions disagree");
  }
  const double mean_term = (a.mean - b.mean).squaredNorm();
  const Eigen::MatrixXd sqrt_a = psd_sqrt(a.cov);
  // tr((Sa Sb)^{1/2}) = tr((Sa^{1/2} Sb Sa^{1/2})^{1/2})
  const Eigen::MatrixXd inner = sqrt_a * b.cov * sqrt_a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (inner + inner.transpose()));
  const double tr_sqrt = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return mean_term + a.cov.trace() + b.cov.trace() - 2.0 * tr_sqrt;
}

double diversity(const Eigen::MatrixXd& features, int s_d, nn::RandomStream& rng) {
  const int n = static_cast<int>(features.rows());
  if (n < 1) throw ValidationError("diversity: empty feature set");
  if (s_d < 1) throw ValidationError("diversity: subset size must be positive");
  const std::vector<int> first = sample_subset(n, s_d, rng);
  const std::vector<int> second = sample_subset(n, s_d, rng);
  double total = 0.0;
  for (int i = 0; i < s_d; ++i) {
    total += (features.row(first[i]) - features.row(second[i])).norm();
  }
  return total / static_cast<double>(s_d);
}

double multimodality(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                     int class_count, int s_l, nn::RandomStream& rng) {
  if (static_cast<int>(labels.size()) != features.rows()) {
    throw ValidationError("multimodality: one label per feature row required");
  }
  if (class_count < 1) throw ValidationError("multimodality: need at least one class");
  if (s_l < 1) throw ValidationError("multimodality: subset size must be positive");

  double total = 0.0;
  for (int c = 0; c < class_count; ++c) {
    std::vector<int> members;
    for (size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(static_cast<int>(i));
    }
    if (members.empty()) {
      throw ValidationError("multimodality: class " + std::to_string(c) + " is empty");
    }
    const std::vector<int> first = sample_subset(static_cast<int>(members.size()), s_l, rng);
    const std::vector<int> second = sample_subset(static_cast<int>(members.size()), s_l, rng);
    for (int i = 0; i < s_l; ++i) {
      total += (features.row(members[first[i]]) - features.row(members[second[i]])).norm();
    }
  }
  return total / static_cast<double>(class_count * s_l);
}

}  // namespace motiongen::eval
