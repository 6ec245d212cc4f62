#pragma once

#include <Eigen/Dense>

namespace motiongen::lie {

using Eigen::Matrix3d;
using Eigen::Vector3d;

/// A 3x3 rotation matrix (orthogonal, det +1). Construct through
/// from_matrix() to get the invariants checked, or receive one from
/// exp_so3() which produces valid rotations by construction.
struct Rotation {
  Matrix3d matrix;

  // Validates orthogonality and determinant to 1e-9 and throws
  // ValidationError on failure.
  static Rotation from_matrix(const Matrix3d& m);

  // Skips validation; for matrices that are rotations by construction.
  static Rotation unchecked(const Matrix3d& m) { return Rotation{m}; }

  static bool is_valid(const Matrix3d& m, double tol = 1e-9);
};

// Skew-symmetric matrix of w, arranged so that skew(w) * v == w x v.
Matrix3d skew(const Vector3d& w);

// Inverse of skew: extracts w from a skew-symmetric matrix.
Vector3d unskew(const Matrix3d& s);

// Rodrigues formula, R = I + sin(t)/t * W + (1-cos(t))/t^2 * W^2 with
// t = |w|. Smooth through t = 0 (series branch below t = 1e-4).
Rotation exp_so3(const Vector3d& w);

// Logarithm map, returning the axis-angle vector with norm in [0, pi].
// Series branch near t = 0; axis extraction from the symmetrized
// (R + I)/2 near t = pi where the direct formula loses the axis.
Vector3d log_so3(const Rotation& r);

// Validating overload for raw matrices.
Vector3d log_so3(const Matrix3d& m);

// Reduces w to the equivalent vector of norm <= pi (same rotation).
Vector3d canonicalize_omega(const Vector3d& w);

// Rodrigues coefficients as analytic functions of t = |w|^2, shared by
// exp_so3 and its pullback. a = sin(s)/s, b = (1-cos(s))/s^2, s = sqrt(t).
double rodrigues_a(double t);
double rodrigues_b(double t);
// c = (s - sin(s))/s^3, the third left-Jacobian coefficient.
double rodrigues_c(double t);

// Left Jacobian of SO(3): J = I + b(t)*W + c(t)*W^2. Relates tangent
// perturbations to rotation perturbations: exp((w+d)^) ~ exp((J d)^) exp(w^).
Matrix3d so3_left_jacobian(const Vector3d& w);

// Pullback of a loss through exp_so3: given G = dL/dR, returns dL/dw.
Vector3d exp_so3_pullback(const Vector3d& w, const Matrix3d& grad_r);

}  // namespace motiongen::lie
