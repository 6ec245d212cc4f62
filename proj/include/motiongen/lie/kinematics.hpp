#pragma once

#include <Eigen/Dense>
#include <vector>

#include "motiongen/lie/skeleton.hpp"
#include "motiongen/lie/so3.hpp"

namespace motiongen::lie {

/// Per-bone axis-angle vectors plus the root joint's world translation.
/// Omega entries follow the skeleton's flattened bone order.
struct LiePose {
  std::vector<Vector3d> omega;
  Vector3d root_translation = Vector3d::Zero();

  // Same rotations, every omega reduced to norm <= pi.
  LiePose canonicalized() const;

  Eigen::VectorXd omega_flat() const;  // 3N, bone-major
  static LiePose from_flat(const Eigen::VectorXd& omega_flat,
                           const Vector3d& root_translation);
};

/// Per-joint world coordinates in meters, indexed by skeleton joint index.
struct JointPose {
  std::vector<Vector3d> joints;

  Eigen::VectorXd flat() const;  // 3J, joint-major
  static JointPose from_flat(const Eigen::VectorXd& v);
};

// Places every joint by composing bone rotations along each chain: a bone
// extends along the current frame's x-axis scaled by its length, then the
// bone's omega is folded into the frame carried to its child. Chains
// anchored mid-body start from the anchor joint's accumulated frame.
JointPose forward_kinematics(const LiePose& pose, const Skeleton& skeleton);

// Flat-vector form used by the differentiable pipeline. `out_positions`
// is resized to 3J. When `out_frames` is non-null it receives the
// accumulated frame at every joint.
void forward_kinematics_flat(const Eigen::VectorXd& omega_flat, const Vector3d& root,
                             const Skeleton& skeleton, Eigen::VectorXd& out_positions,
                             std::vector<Matrix3d>* out_frames = nullptr);

// Reverse sweep of forward_kinematics_flat: given dL/d(positions), fills
// dL/d(omega) and dL/d(root). Walks bones in reverse chain order so every
// adjoint is complete before it is consumed.
void forward_kinematics_pullback(const Eigen::VectorXd& omega_flat,
                                 const Skeleton& skeleton,
                                 const Eigen::VectorXd& grad_positions,
                                 Eigen::VectorXd& grad_omega, Vector3d& grad_root);

// Recovers per-bone omegas from joint positions by aligning each frame's
// x-axis to the next bone direction with the minimal (zero-twist)
// rotation. Exact for poses produced by forward_kinematics; a chain's
// first bone direction is fixed by its anchor frame and carries no omega
// of its own, and the omega of each chain's last bone is unobservable and
// comes back zero. Throws on coincident consecutive joints.
LiePose inverse_kinematics(const JointPose& pose, const Skeleton& skeleton);

// Euclidean bone lengths read off a pose. Throws on degenerate bones.
std::vector<double> measure_bone_lengths(const JointPose& pose, const Skeleton& skeleton);

// Copy of `skeleton` carrying bone lengths measured from `pose`.
Skeleton measured_skeleton(const JointPose& pose, const Skeleton& skeleton);

}  // namespace motiongen::lie
