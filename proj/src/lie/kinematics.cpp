#include "motiongen/lie/kinematics.hpp"

#include <cmath>

#include "motiongen/common.hpp"

namespace motiongen::lie {

LiePose LiePose::canonicalized() const {
  LiePose out = *this;
  for (auto& w : out.omega) w = canonicalize_omega(w);
  return out;
}

Eigen::VectorXd LiePose::omega_flat() const {
  Eigen::VectorXd v(3 * omega.size());
  for (size_t i = 0; i < omega.size(); ++i) v.segment<3>(3 * i) = omega[i];
  return v;
}

LiePose LiePose::from_flat(const Eigen::VectorXd& omega_flat,
                           const Vector3d& root_translation) {
  if (omega_flat.size() % 3 != 0) {
    throw ValidationError("omega vector length must be a multiple of 3");
  }
  LiePose pose;
  pose.omega.resize(omega_flat.size() / 3);
  for (size_t i = 0; i < pose.omega.size(); ++i) {
    pose.omega[i] = omega_flat.segment<3>(3 * i);
  }
  pose.root_translation = root_translation;
  return pose;
}

Eigen::VectorXd JointPose::flat() const {
  Eigen::VectorXd v(3 * joints.size());
  for (size_t i = 0; i < joints.size(); ++i) v.segment<3>(3 * i) = joints[i];
  return v;
}

JointPose JointPose::from_flat(const Eigen::VectorXd& v) {
  if (v.size() % 3 != 0) {
    throw ValidationError("joint vector length must be a multiple of 3");
  }
  JointPose pose;
  pose.joints.resize(v.size() / 3);
  for (size_t i = 0; i < pose.joints.size(); ++i) pose.joints[i] = v.segment<3>(3 * i);
  return pose;
}

void forward_kinematics_flat(const Eigen::VectorXd& omega_flat, const Vector3d& root,
                             const Skeleton& skeleton, Eigen::VectorXd& out_positions,
                             std::vector<Matrix3d>* out_frames) {
  const int n = skeleton.bone_count();
  if (omega_flat.size() != 3 * n) {
    throw ValidationError("pose has " + std::to_string(omega_flat.size() / 3) +
                          " omegas, skeleton has " + std::to_string(n) + " bones");
  }
  const int j = skeleton.joint_count();
  std::vector<Vector3d> pos(j);
  std::vector<Matrix3d> frame(j);
  pos[skeleton.root_index()] = root;
  frame[skeleton.root_index()] = Matrix3d::Identity();

  const auto& bones = skeleton.bones();
  const auto& lengths = skeleton.bone_lengths();
  for (int b = 0; b < n; ++b) {
    const Bone& bone = bones[b];
    // The bone extends along its parent frame's x-axis; its own omega
    // only rotates the frame carried onward to the child.
    pos[bone.child] = pos[bone.parent] + lengths[b] * frame[bone.parent].col(0);
    frame[bone.child] =
        frame[bone.parent] * exp_so3(omega_flat.segment<3>(3 * b)).matrix;
  }

  out_positions.resize(3 * j);
  for (int i = 0; i < j; ++i) out_positions.segment<3>(3 * i) = pos[i];
  if (out_frames) *out_frames = std::move(frame);
}

JointPose forward_kinematics(const LiePose& pose, const Skeleton& skeleton) {
  Eigen::VectorXd flat;
  forward_kinematics_flat(pose.omega_flat(), pose.root_translation, skeleton, flat);
  return JointPose::from_flat(flat);
}

void forward_kinematics_pullback(const Eigen::VectorXd& omega_flat,
                                 const Skeleton& skeleton,
                                 const Eigen::VectorXd& grad_positions,
                                 Eigen::VectorXd& grad_omega, Vector3d& grad_root) {
  const int n = skeleton.bone_count();
  const int j = skeleton.joint_count();
  if (grad_positions.size() != 3 * j) {
    throw ValidationError("gradient length does not match skeleton joint count");
  }
  Eigen::VectorXd positions;
  std::vector<Matrix3d> frame;
  forward_kinematics_flat(omega_flat, Vector3d::Zero(), skeleton, positions, &frame);

  std::vector<Vector3d> adj_pos(j);
  std::vector<Matrix3d> adj_frame(j, Matrix3d::Zero());
  for (int i = 0; i < j; ++i) adj_pos[i] = grad_positions.segment<3>(3 * i);

  grad_omega.setZero(3 * n);
  const auto& bones = skeleton.bones();
  const auto& lengths = skeleton.bone_lengths();
  for (int b = n - 1; b >= 0; --b) {
    const Bone& bone = bones[b];
    const Vector3d w = omega_flat.segment<3>(3 * b);
    const Matrix3d r = exp_so3(w).matrix;
    // frame[child] = frame[parent] * R
    const Matrix3d adj_r = frame[bone.parent].transpose() * adj_frame[bone.child];
    adj_frame[bone.parent] += adj_frame[bone.child] * r.transpose();
    grad_omega.segment<3>(3 * b) = exp_so3_pullback(w, adj_r);
    // pos[child] = pos[parent] + L * frame[parent].col(0)
    adj_pos[bone.parent] += adj_pos[bone.child];
    adj_frame[bone.parent].col(0) += lengths[b] * adj_pos[bone.child];
  }
  grad_root = adj_pos[skeleton.root_index()];
}

namespace {

// Minimal rotation mapping the x-axis onto unit vector u.
Vector3d omega_aligning_x(const Vector3d& u) {
  const Vector3d axis(0.0, -u.z(), u.y());  // e1 x u
  const double s = axis.norm();
  const double c = u.x();
  if (s < 1e-15) {
    if (c > 0.0) return Vector3d::Zero();
    return Vector3d(0.0, 0.0, M_PI);  // antipodal; any axis in the yz-plane works
  }
  return (std::atan2(s, c) / s) * axis;
}

}  // namespace

std::vector<double> measure_bone_lengths(const JointPose& pose, const Skeleton& skeleton) {
  if (static_cast<int>(pose.joints.size()) != skeleton.joint_count()) {
    throw ValidationError("pose has " + std::to_string(pose.joints.size()) +
                          " joints, skeleton has " + std::to_string(skeleton.joint_count()));
  }
  std::vector<double> lengths;
  lengths.reserve(skeleton.bone_count());
  for (const Bone& bone : skeleton.bones()) {
    const double l = (pose.joints[bone.child] - pose.joints[bone.parent]).norm();
    if (l < 1e-9) {
      throw ValidationError("degenerate pose: joints " + std::to_string(bone.parent) +
                            " and " + std::to_string(bone.child) + " coincide");
    }
    lengths.push_back(l);
  }
  return lengths;
}

Skeleton measured_skeleton(const JointPose& pose, const Skeleton& skeleton) {
  return Skeleton(skeleton.name(), skeleton.joints(), skeleton.chains(),
                  measure_bone_lengths(pose, skeleton), skeleton.root_index());
}

LiePose inverse_kinematics(const JointPose& pose, const Skeleton& skeleton) {
  if (static_cast<int>(pose.joints.size()) != skeleton.joint_count()) {
    throw ValidationError("pose joint count does not match skeleton");
  }
  measure_bone_lengths(pose, skeleton);  // rejects coincident consecutive joints
  const int j = skeleton.joint_count();
  std::vector<Matrix3d> frame(j);
  frame[skeleton.root_index()] = Matrix3d::Identity();

  LiePose out;
  out.omega.assign(skeleton.bone_count(), Vector3d::Zero());
  out.root_translation = pose.joints[skeleton.root_index()];

  // Each omega is fixed by the direction of the *next* bone in its chain:
  // the last bone of a chain leaves its omega at the zero-twist default.
  const auto& bones = skeleton.bones();
  for (size_t b = 0; b < bones.size(); ++b) {
    const Bone& bone = bones[b];
    const bool has_successor =
        b + 1 < bones.size() && bones[b + 1].chain == bone.chain;
    if (has_successor) {
      // The next bone extends along frame[parent] * exp(omega_b) * x, so
      // omega_b is the zero-twist rotation taking x onto its direction
      // expressed in the parent frame.
      const Bone& next = bones[b + 1];
      const Vector3d v = pose.joints[next.child] - pose.joints[next.parent];
      const double len = v.norm();
      if (len < 1e-9) {
        throw ValidationError("degenerate pose: joints " + std::to_string(next.parent) +
                              " and " + std::to_string(next.child) + " coincide");
      }
      const Vector3d u = frame[bone.parent].transpose() * (v / len);
      out.omega[b] = omega_aligning_x(u);
    }
    frame[bone.child] = frame[bone.parent] * exp_so3(out.omega[b]).matrix;
  }
  return out;
}

}  // namespace motiongen::lie
