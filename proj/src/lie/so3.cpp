#include "motiongen/lie/so3.hpp"

#include <cmath>

#include "motiongen/common.hpp"

namespace motiongen::lie {

namespace {
constexpr double kSmallAngleSq = 1e-8;  // t = theta^2 below which series apply
constexpr double kNearPi = 1e-5;        // pi - theta below which axis extraction applies
}  // namespace

bool Rotation::is_valid(const Matrix3d& m, double tol) {
  const Matrix3d err = m.transpose() * m - Matrix3d::Identity();
  if (err.norm() > tol) return false;
  if (std::abs(m.determinant() - 1.0) > tol) return false;
  return true;
}

Rotation Rotation::from_matrix(const Matrix3d& m) {
  if (!is_valid(m)) {
    throw ValidationError("matrix is not a rotation: R^T R != I or det != +1 within 1e-9");
  }
  return Rotation{m};
}

Matrix3d skew(const Vector3d& w) {
  Matrix3d s;
  s << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
      -w.y(), w.x(), 0.0;
  return s;
}

Vector3d unskew(const Matrix3d& s) {
  return Vector3d(s(2, 1), s(0, 2), s(1, 0));
}

double rodrigues_a(double t) {
  if (t < kSmallAngleSq) {
    return 1.0 - t / 6.0 + t * t / 120.0;
  }
  const double s = std::sqrt(t);
  return std::sin(s) / s;
}

double rodrigues_b(double t) {
  if (t < kSmallAngleSq) {
    return 0.5 - t / 24.0 + t * t / 720.0;
  }
  return (1.0 - std::cos(std::sqrt(t))) / t;
}

double rodrigues_c(double t) {
  if (t < kSmallAngleSq) {
    return 1.0 / 6.0 - t / 120.0 + t * t / 5040.0;
  }
  const double s = std::sqrt(t);
  return (s - std::sin(s)) / (t * s);
}

Rotation exp_so3(const Vector3d& w) {
  const double t = w.squaredNorm();
  const Matrix3d wh = skew(w);
  Matrix3d r = Matrix3d::Identity() + rodrigues_a(t) * wh + rodrigues_b(t) * (wh * wh);
  return Rotation::unchecked(r);
}

Vector3d log_so3(const Rotation& r) {
  const Matrix3d& m = r.matrix;
  double c = (m.trace() - 1.0) * 0.5;
  c = std::min(1.0, std::max(-1.0, c));
  const double theta = std::acos(c);

  const Vector3d v(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));

  if (theta < 1e-4) {
    // theta/(2 sin theta) expanded: v itself is 2 sin(theta) * axis.
    const double t2 = theta * theta;
    const double coeff = 0.5 + t2 / 12.0 + 7.0 * t2 * t2 / 720.0;
    return coeff * v;
  }

  if (M_PI - theta < kNearPi) {
    // Near pi the antisymmetric part vanishes; the symmetric part
    // (R + I)/2 tends to n n^T, so read the axis off its diagonal and
    // fix component signs from the dominant row.
    const Matrix3d s = 0.25 * (m + m.transpose()) + 0.5 * Matrix3d::Identity();
    int k = 0;
    s.diagonal().maxCoeff(&k);
    Vector3d n;
    n[k] = std::sqrt(std::max(s(k, k), 0.0));
    for (int j = 0; j < 3; ++j) {
      if (j != k) n[j] = s(k, j) / n[k];
    }
    n.normalize();
    // Overall sign: align with the residual antisymmetric part when it
    // is measurable, otherwise pick the lexicographically positive axis.
    if (v.squaredNorm() > 1e-24) {
      if (n.dot(v) < 0.0) n = -n;
    } else {
      for (int j = 0; j < 3; ++j) {
        if (std::abs(n[j]) > 1e-12) {
          if (n[j] < 0.0) n = -n;
          break;
        }
      }
    }
    return theta * n;
  }

  return (theta / (2.0 * std::sin(theta))) * v;
}

Vector3d log_so3(const Matrix3d& m) {
  return log_so3(Rotation::from_matrix(m));
}

Vector3d canonicalize_omega(const Vector3d& w) {
  const double theta = w.norm();
  if (theta <= M_PI) return w;
  // Wrap the angle into [0, 2pi), then fold (pi, 2pi) onto the opposite axis.
  double wrapped = std::fmod(theta, 2.0 * M_PI);
  if (wrapped > M_PI) wrapped -= 2.0 * M_PI;  // now in (-pi, pi]
  return w * (wrapped / theta);
}

Matrix3d so3_left_jacobian(const Vector3d& w) {
  const double t = w.squaredNorm();
  const Matrix3d wh = skew(w);
  return Matrix3d::Identity() + rodrigues_b(t) * wh + rodrigues_c(t) * (wh * wh);
}

Vector3d exp_so3_pullback(const Vector3d& w, const Matrix3d& grad_r) {
  // dL = <G, dR> with dR = (J_l d)^ R  =>  dL/dw = J_l^T vee(G R^T - R G^T).
  const Matrix3d r = exp_so3(w).matrix;
  const Matrix3d m = grad_r * r.transpose();
  const Vector3d vee(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  return so3_left_jacobian(w).transpose() * vee;
}

}  // namespace motiongen::lie
