#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>

#include "motiongen/common.hpp"
#include "motiongen/lie/kinematics.hpp"
#include "motiongen/lie/skeleton.hpp"
#include "motiongen/lie/so3.hpp"
#include "motiongen/nn/random.hpp"

using namespace motiongen;
using lie::JointPose;
using lie::LiePose;
using lie::Skeleton;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {

Vector3d random_omega(nn::RandomStream& rng, double min_norm, double max_norm) {
  Vector3d axis(rng.normal(), rng.normal(), rng.normal());
  while (axis.norm() < 1e-6) axis = Vector3d(rng.normal(), rng.normal(), rng.normal());
  axis.normalize();
  return axis * rng.uniform(min_norm, max_norm);
}

// Two-bone straight test chain: joints 0-1-2 along one path.
Skeleton two_bone_chain(double l0 = 1.0, double l1 = 1.0) {
  return Skeleton("chain", {"a", "b", "c"}, {{0, 1, 2}}, {l0, l1}, 0);
}

Skeleton three_bone_chain() {
  return Skeleton("chain3", {"a", "b", "c", "d"}, {{0, 1, 2, 3}}, {1.0, 1.0, 1.0}, 0);
}

// Small branched skeleton: a trunk with one limb off the middle joint.
Skeleton branched() {
  return Skeleton("branched", {"root", "t1", "t2", "l1", "l2"},
                  {{0, 1, 2}, {1, 3, 4}}, {0.5, 0.4, 0.3, 0.2}, 0);
}

LiePose random_pose(const Skeleton& s, nn::RandomStream& rng, double max_angle = 3.0) {
  LiePose pose;
  pose.omega.resize(s.bone_count());
  for (auto& w : pose.omega) w = random_omega(rng, 0.0, max_angle);
  pose.root_translation =
      Vector3d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  return pose;
}

}  // namespace

TEST_CASE("skew matches the standard arrangement") {
  const Matrix3d z = lie::skew(Vector3d::Zero());
  CHECK(z.isZero(0.0));

  Matrix3d expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  CHECK((lie::skew(Vector3d(1, 2, 3)) - expected).norm() == 0.0);
}

TEST_CASE("skew acts as the cross product") {
  nn::RandomStream rng(11);
  for (int i = 0; i < 50; ++i) {
    const Vector3d w(rng.normal(), rng.normal(), rng.normal());
    const Vector3d v(rng.normal(), rng.normal(), rng.normal());
    CHECK((lie::skew(w) * v - w.cross(v)).norm() < 1e-14);
    CHECK((lie::unskew(lie::skew(w)) - w).norm() == 0.0);
  }
}

TEST_CASE("exp of zero is the identity") {
  CHECK((lie::exp_so3(Vector3d::Zero()).matrix - Matrix3d::Identity()).norm() == 0.0);
}

TEST_CASE("exp of a quarter turn about z") {
  Matrix3d expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((lie::exp_so3(Vector3d(0, 0, M_PI / 2)).matrix - expected).norm() < 1e-15);
}

TEST_CASE("exp output satisfies the rotation invariants") {
  nn::RandomStream rng(12);
  for (int i = 0; i < 200; ++i) {
    const Vector3d w = random_omega(rng, 0.0, 6.0);
    CHECK(lie::Rotation::is_valid(lie::exp_so3(w).matrix));
  }
}

TEST_CASE("log of identity and the quarter turn") {
  CHECK(lie::log_so3(lie::Rotation::unchecked(Matrix3d::Identity())).norm() == 0.0);
  Matrix3d quarter;
  quarter << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  const Vector3d w = lie::log_so3(quarter);
  CHECK((w - Vector3d(0, 0, M_PI / 2)).norm() < 1e-14);
}

TEST_CASE("log rejects non-rotations") {
  Matrix3d bad = Matrix3d::Identity();
  bad(0, 0) = 1.01;
  CHECK_THROWS_AS(lie::log_so3(bad), ValidationError);
  Matrix3d reflection = Matrix3d::Identity();
  reflection(2, 2) = -1.0;  // det = -1
  CHECK_THROWS_AS(lie::log_so3(reflection), ValidationError);
}

TEST_CASE("log near pi recovers the axis") {
  // Rotation by 3.14159 about x, built independently via Eigen.
  const double angle = 3.14159;
  const Matrix3d r = Eigen::AngleAxisd(angle, Vector3d::UnitX()).toRotationMatrix();
  const Vector3d w = lie::log_so3(lie::Rotation::unchecked(r));
  CHECK(std::abs(w.norm() - M_PI) < 1e-5);
  CHECK(std::abs(std::abs(w.x()) - angle) < 1e-5);
  CHECK(std::abs(w.y()) < 1e-5);
  CHECK(std::abs(w.z()) < 1e-5);
}

TEST_CASE("log/exp round trip over the full angle range") {
  nn::RandomStream rng(13);
  for (int i = 0; i < 2000; ++i) {
    const Vector3d w = random_omega(rng, 1e-9, M_PI - 1e-3);
    const Vector3d back = lie::log_so3(lie::exp_so3(w));
    CHECK((back - w).cwiseAbs().maxCoeff() < 1e-8);
  }
  // Near-pi cases, checked through the eigen-extraction branch.
  for (int i = 0; i < 500; ++i) {
    const Vector3d w = random_omega(rng, M_PI - 1e-3, M_PI - 1e-12);
    const Vector3d back = lie::log_so3(lie::exp_so3(w));
    CHECK((back - w).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("exp/log round trip on random rotations") {
  nn::RandomStream rng(14);
  for (int i = 0; i < 500; ++i) {
    const Matrix3d r = lie::exp_so3(random_omega(rng, 0.0, M_PI - 1e-6)).matrix;
    const Matrix3d back = lie::exp_so3(lie::log_so3(lie::Rotation::unchecked(r))).matrix;
    CHECK((back - r).norm() < 1e-8);
  }
}

TEST_CASE("canonicalize_omega folds long rotations back") {
  const Vector3d w(0, 0, 1.5 * M_PI);
  const Vector3d c = lie::canonicalize_omega(w);
  CHECK(c.norm() <= M_PI + 1e-15);
  CHECK((lie::exp_so3(c).matrix - lie::exp_so3(w).matrix).norm() < 1e-12);
  // Norm <= pi is untouched.
  const Vector3d small(0.1, 0.2, 0.3);
  CHECK((lie::canonicalize_omega(small) - small).norm() == 0.0);
}

TEST_CASE("skeleton validation") {
  CHECK_THROWS_AS(Skeleton("bad", {"a", "b"}, {{0, 1}}, {0.0}, 0), ValidationError);
  CHECK_THROWS_AS(Skeleton("bad", {"a", "b"}, {{0, 5}}, {1.0}, 0), ValidationError);
  CHECK_THROWS_AS(Skeleton("bad", {"a", "b", "c"}, {{0, 1}}, {1.0}, 0), ValidationError);
  // Duplicate interior membership.
  CHECK_THROWS_AS(Skeleton("bad", {"a", "b", "c"}, {{0, 1, 2}, {0, 2}}, {1, 1, 1}, 0),
                  ValidationError);
  // Anchor not yet placed.
  CHECK_THROWS_AS(Skeleton("bad", {"a", "b", "c"}, {{1, 2}, {0, 1}}, {1, 1}, 0),
                  ValidationError);
}

TEST_CASE("fk with zero rotations extends each chain along x") {
  const Skeleton s = three_bone_chain();
  LiePose pose;
  pose.omega.assign(3, Vector3d::Zero());
  const JointPose joints = lie::forward_kinematics(pose, s);
  for (int i = 0; i < 4; ++i) {
    CHECK((joints.joints[i] - Vector3d(i, 0, 0)).norm() < 1e-15);
  }
}

TEST_CASE("fk two-bone hand evaluation") {
  // First omega rotates the frame after the first bone is placed, so the
  // first bone stays on the x-axis and the second one turns.
  const Skeleton s = two_bone_chain();
  LiePose pose;
  pose.omega = {Vector3d(0, 0, M_PI / 2), Vector3d::Zero()};
  const JointPose joints = lie::forward_kinematics(pose, s);
  CHECK((joints.joints[0] - Vector3d(0, 0, 0)).norm() < 1e-15);
  CHECK((joints.joints[1] - Vector3d(1, 0, 0)).norm() < 1e-15);
  CHECK((joints.joints[2] - Vector3d(1, 1, 0)).norm() < 1e-14);
}

TEST_CASE("fk preserves bone lengths for arbitrary omegas") {
  const Skeleton s = branched();
  nn::RandomStream rng(15);
  for (int i = 0; i < 200; ++i) {
    const LiePose pose = random_pose(s, rng);
    const JointPose joints = lie::forward_kinematics(pose, s);
    const auto& bones = s.bones();
    for (size_t b = 0; b < bones.size(); ++b) {
      const double len = (joints.joints[bones[b].child] - joints.joints[bones[b].parent]).norm();
      CHECK(std::abs(len - s.bone_lengths()[b]) < 1e-9);
    }
  }
}

TEST_CASE("fk is equivariant under root translation") {
  const Skeleton s = branched();
  nn::RandomStream rng(16);
  for (int i = 0; i < 50; ++i) {
    LiePose pose = random_pose(s, rng);
    const JointPose a = lie::forward_kinematics(pose, s);
    const Vector3d t(rng.normal(), rng.normal(), rng.normal());
    pose.root_translation += t;
    const JointPose b = lie::forward_kinematics(pose, s);
    for (size_t j = 0; j < a.joints.size(); ++j) {
      CHECK((b.joints[j] - a.joints[j] - t).norm() < 1e-9);
    }
  }
}

TEST_CASE("fk scales uniformly with bone lengths and root") {
  const Skeleton s = branched();
  nn::RandomStream rng(17);
  const double factor = 2.5;
  const Skeleton scaled = lie::scale_skeleton(s, {factor});
  for (int i = 0; i < 50; ++i) {
    LiePose pose = random_pose(s, rng);
    const JointPose a = lie::forward_kinematics(pose, s);
    LiePose scaled_pose = pose;
    scaled_pose.root_translation *= factor;
    const JointPose b = lie::forward_kinematics(scaled_pose, scaled);
    for (size_t j = 0; j < a.joints.size(); ++j) {
      CHECK((b.joints[j] - factor * a.joints[j]).norm() < 1e-9);
    }
  }
}

TEST_CASE("fk rejects omega count mismatch") {
  const Skeleton s = two_bone_chain();
  LiePose pose;
  pose.omega.assign(3, Vector3d::Zero());
  CHECK_THROWS_AS(lie::forward_kinematics(pose, s), ValidationError);
}

TEST_CASE("scale_skeleton identity and validation") {
  const Skeleton s = branched();
  const Skeleton same = lie::scale_skeleton(s, {1.0});
  CHECK(same.bone_lengths() == s.bone_lengths());
  CHECK_THROWS_AS(lie::scale_skeleton(s, {-1.0}), ValidationError);
  CHECK_THROWS_AS(lie::scale_skeleton(s, {1.0, 1.0}), ValidationError);
}

TEST_CASE("scaling one bone moves only that bone's span") {
  const Skeleton s = three_bone_chain();
  nn::RandomStream rng(18);
  const LiePose pose = random_pose(s, rng);
  std::vector<double> factors{1.0, 2.0, 1.0};
  const Skeleton scaled = lie::scale_skeleton(s, factors);
  const JointPose a = lie::forward_kinematics(pose, s);
  const JointPose b = lie::forward_kinematics(pose, scaled);
  CHECK(std::abs((b.joints[2] - b.joints[1]).norm() -
                 2.0 * (a.joints[2] - a.joints[1]).norm()) < 1e-12);
  CHECK(std::abs((b.joints[1] - b.joints[0]).norm() -
                 (a.joints[1] - a.joints[0]).norm()) < 1e-12);
}

TEST_CASE("ik recovers fk output") {
  const Skeleton s = branched();
  nn::RandomStream rng(19);
  for (int i = 0; i < 100; ++i) {
    const LiePose pose = random_pose(s, rng);
    const JointPose joints = lie::forward_kinematics(pose, s);
    const LiePose recovered = lie::inverse_kinematics(joints, s);
    const Skeleton measured = lie::measured_skeleton(joints, s);
    const JointPose again = lie::forward_kinematics(recovered, measured);
    for (size_t j = 0; j < joints.joints.size(); ++j) {
      CHECK((again.joints[j] - joints.joints[j]).norm() < 1e-6);
    }
  }
}

TEST_CASE("ik of a straight chain is all zeros") {
  const Skeleton s = three_bone_chain();
  JointPose pose;
  pose.joints = {Vector3d(0, 0, 0), Vector3d(1, 0, 0), Vector3d(2, 0, 0),
                 Vector3d(3, 0, 0)};
  const LiePose lie_pose = lie::inverse_kinematics(pose, s);
  for (const auto& w : lie_pose.omega) CHECK(w.norm() < 1e-12);
  CHECK(lie_pose.root_translation.norm() == 0.0);
}

TEST_CASE("ik is invariant under uniform translation") {
  const Skeleton s = branched();
  nn::RandomStream rng(20);
  const LiePose pose = random_pose(s, rng);
  JointPose joints = lie::forward_kinematics(pose, s);
  const LiePose a = lie::inverse_kinematics(joints, s);
  const Vector3d t(0.3, -1.2, 0.8);
  for (auto& j : joints.joints) j += t;
  const LiePose b = lie::inverse_kinematics(joints, s);
  for (size_t i = 0; i < a.omega.size(); ++i) {
    CHECK((a.omega[i] - b.omega[i]).norm() < 1e-12);
  }
  CHECK((b.root_translation - a.root_translation - t).norm() < 1e-12);
}

TEST_CASE("ik rejects coincident joints") {
  const Skeleton s = two_bone_chain();
  JointPose pose;
  pose.joints = {Vector3d(0, 0, 0), Vector3d(0, 0, 0), Vector3d(1, 0, 0)};
  CHECK_THROWS_AS(lie::inverse_kinematics(pose, s), ValidationError);
}

TEST_CASE("ik idempotence") {
  const Skeleton s = branched();
  nn::RandomStream rng(21);
  for (int i = 0; i < 30; ++i) {
    const JointPose joints = lie::forward_kinematics(random_pose(s, rng), s);
    const LiePose first = lie::inverse_kinematics(joints, s);
    const Skeleton measured = lie::measured_skeleton(joints, s);
    const JointPose mid = lie::forward_kinematics(first, measured);
    const LiePose second = lie::inverse_kinematics(mid, s);
    for (size_t b = 0; b < first.omega.size(); ++b) {
      CHECK((first.omega[b] - second.omega[b]).norm() < 1e-6);
    }
  }
}

TEST_CASE("fk pullback matches finite differences") {
  const Skeleton s = branched();
  nn::RandomStream rng(22);
  const int n = s.bone_count();
  const int j = s.joint_count();
  Eigen::VectorXd omega(3 * n);
  for (int i = 0; i < omega.size(); ++i) omega[i] = rng.uniform(-1.5, 1.5);
  // Random loss direction over joint positions.
  Eigen::VectorXd gout(3 * j);
  for (int i = 0; i < gout.size(); ++i) gout[i] = rng.normal();

  Eigen::VectorXd grad_omega;
  Vector3d grad_root;
  lie::forward_kinematics_pullback(omega, s, gout, grad_omega, grad_root);

  const double h = 1e-6;
  Eigen::VectorXd pos_up, pos_down;
  for (int i = 0; i < omega.size(); ++i) {
    Eigen::VectorXd w = omega;
    w[i] += h;
    lie::forward_kinematics_flat(w, Vector3d::Zero(), s, pos_up);
    w[i] -= 2 * h;
    lie::forward_kinematics_flat(w, Vector3d::Zero(), s, pos_down);
    const double numeric = gout.dot(pos_up - pos_down) / (2 * h);
    CHECK(std::abs(numeric - grad_omega[i]) < 1e-5);
  }
  // Root gradient is the sum of all position gradients.
  Eigen::Vector3d expected_root = Eigen::Vector3d::Zero();
  for (int i = 0; i < j; ++i) expected_root += gout.segment<3>(3 * i);
  CHECK((grad_root - expected_root).norm() < 1e-12);
}
