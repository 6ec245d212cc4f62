#pragma once

#include <memory>
#include <string>
#include <vector>

#include "motiongen/data/manifest.hpp"
#include "motiongen/lie/kinematics.hpp"
#include "motiongen/nn/tensor.hpp"

namespace motiongen::data {

using nn::Matrix;

/// Maps between world joint coordinates and the network pose vector.
/// The network vector keeps the joint-major 3J layout; non-root slots
/// hold root-relative offsets (translation invariant), and the root slot
/// holds the root's displacement from the sequence's first frame,
/// standardized per axis with statistics from the training split.
struct PoseNormalizer {
  int root_index = 0;
  int joint_count = 0;
  Eigen::Vector3d traj_mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d traj_std = Eigen::Vector3d::Ones();

  Eigen::VectorXd to_network(const Eigen::VectorXd& world,
                             const Eigen::Vector3d& first_root) const;
  // `anchor` is the world position of the sequence's first-frame root.
  Eigen::VectorXd to_world(const Eigen::VectorXd& net,
                           const Eigen::Vector3d& anchor) const;
  Eigen::Vector3d root_world(const Eigen::VectorXd& net,
                             const Eigen::Vector3d& anchor) const;
};

/// One motion ready for training: network-space frames, Lie parameters
/// per frame, and the world root trajectory.
struct PreprocessedMotion {
  int action_id = -1;
  Matrix net_frames;   // T x 3J
  Matrix lie_frames;   // T x 3N
  Matrix trajectory;   // T x 3 world root positions
};

struct PreparedDataset {
  std::shared_ptr<const lie::Skeleton> skeleton;
  std::vector<std::string> action_names;
  PoseNormalizer normalizer;
  std::vector<PreprocessedMotion> train;
  std::vector<PreprocessedMotion> test;

  int pose_dim() const { return 3 * normalizer.joint_count; }
  int action_count() const { return static_cast<int>(action_names.size()); }
};

// Converts every motion to Lie parameters via inverse kinematics, splits
// by the manifest assignment, and computes trajectory statistics on the
// training split only. IK failures are reported with the record's path.
PreparedDataset preprocess(const LoadedDataset& dataset);

}  // namespace motiongen::data
