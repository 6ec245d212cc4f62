#pragma once

#include <Eigen/Dense>
#include <vector>

#include "motiongen/nn/random.hpp"

namespace motiongen::eval {

/// Gaussian fit of a feature set: mean and unbiased covariance.
struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Rows of `features` are per-motion feature vectors; needs >= 2 rows.
GaussianStats fit_gaussian(const Eigen::MatrixXd& features);

// Frechet distance between Gaussians:
//   |mu_a - mu_b|^2 + tr(Sa + Sb - 2 (Sa Sb)^{1/2}),
// with the matrix square root evaluated through the symmetrized product
// Sa^{1/2} Sb Sa^{1/2}; slightly negative eigenvalues are clamped to zero.
double fid(const GaussianStats& a, const GaussianStats& b);

// Mean L2 distance between two independently sampled subsets of size
// `s_d` (without replacement when the pool is large enough, with
// replacement otherwise).
double diversity(const Eigen::MatrixXd& features, int s_d, nn::RandomStream& rng);

// Per-class paired-subset distance of size `s_l`, averaged over classes.
double multimodality(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                     int class_count, int s_l, nn::RandomStream& rng);

}  // namespace motiongen::eval
