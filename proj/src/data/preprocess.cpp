#include "motiongen/data/preprocess.hpp"

#include <cmath>

#include "motiongen/common.hpp"

namespace motiongen::data {

Eigen::VectorXd PoseNormalizer::to_network(const Eigen::VectorXd& world,
                                           const Eigen::Vector3d& first_root) const {
  if (world.size() != 3 * joint_count) {
    throw ValidationError("pose vector length does not match the normalizer");
  }
  const Eigen::Vector3d root = world.segment<3>(3 * root_index);
  Eigen::VectorXd net(world.size());
  for (int j = 0; j < joint_count; ++j) {
    if (j == root_index) {
      net.segment<3>(3 * j) =
          ((root - first_root - traj_mean).array() / traj_std.array()).matrix();
    } else {
      net.segment<3>(3 * j) = world.segment<3>(3 * j) - root;
    }
  }
  return net;
}

Eigen::Vector3d PoseNormalizer::root_world(const Eigen::VectorXd& net,
                                           const Eigen::Vector3d& anchor) const {
  const Eigen::Vector3d coded = net.segment<3>(3 * root_index);
  return anchor + traj_mean + (coded.array() * traj_std.array()).matrix();
}

Eigen::VectorXd PoseNormalizer::to_world(const Eigen::VectorXd& net,
                                         const Eigen::Vector3d& anchor) const {
  if (net.size() != 3 * joint_count) {
    throw ValidationError("pose vector length does not match the normalizer");
  }
  const Eigen::Vector3d root = root_world(net, anchor);
  Eigen::VectorXd world(net.size());
  for (int j = 0; j < joint_count; ++j) {
    if (j == root_index) {
      world.segment<3>(3 * j) = root;
    } else {
      world.segment<3>(3 * j) = net.segment<3>(3 * j) + root;
    }
  }
  return world;
}

namespace {

PreprocessedMotion convert_motion(const MotionRecord& rec, const lie::Skeleton& skeleton,
                                  const std::string& origin) {
  PreprocessedMotion out;
  out.action_id = rec.action_id;
  const int t = rec.frame_count();
  out.lie_frames.resize(t, 3 * skeleton.bone_count());
  out.trajectory.resize(t, 3);
  for (int i = 0; i < t; ++i) {
    const lie::JointPose pose = lie::JointPose::from_flat(rec.frames.row(i).transpose());
    try {
      const lie::LiePose lie_pose = lie::inverse_kinematics(pose, skeleton);
      out.lie_frames.row(i) = lie_pose.omega_flat().transpose();
      out.trajectory.row(i) = lie_pose.root_translation.transpose();
    } catch (const ValidationError& e) {
      throw ValidationError(origin + " frame " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

PreparedDataset preprocess(const LoadedDataset& dataset) {
  PreparedDataset prepared;
  prepared.skeleton = dataset.skeleton;
  prepared.action_names = dataset.manifest.action_names;
  prepared.normalizer.root_index = dataset.skeleton->root_index();
  prepared.normalizer.joint_count = dataset.skeleton->joint_count();

  std::vector<PreprocessedMotion> converted;
  converted.reserve(dataset.records.size());
  for (size_t i = 0; i < dataset.records.size(); ++i) {
    const std::string origin = dataset.manifest.entries.empty()
                                   ? "record " + std::to_string(i)
                                   : dataset.manifest.entries[i].path;
    converted.push_back(convert_motion(dataset.records[i], *dataset.skeleton, origin));
  }

  // Trajectory statistics over first-frame-relative displacements,
  // training split only.
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  Eigen::Vector3d sum_sq = Eigen::Vector3d::Zero();
  long count = 0;
  for (size_t i = 0; i < converted.size(); ++i) {
    if (dataset.manifest.entries[i].is_test) continue;
    const Eigen::Vector3d first = converted[i].trajectory.row(0).transpose();
    for (int r = 0; r < converted[i].trajectory.rows(); ++r) {
      const Eigen::Vector3d d = converted[i].trajectory.row(r).transpose() - first;
      sum += d;
      sum_sq += d.cwiseProduct(d);
      ++count;
    }
  }
  if (count < 2) throw ValidationError("training split is empty or too small");
  prepared.normalizer.traj_mean = sum / static_cast<double>(count);
  for (int a = 0; a < 3; ++a) {
    const double var = (sum_sq[a] - sum[a] * sum[a] / static_cast<double>(count)) /
                       static_cast<double>(count - 1);
    const double sd = std::sqrt(std::max(var, 0.0));
    prepared.normalizer.traj_std[a] = sd < 1e-8 ? 1.0 : sd;
  }

  // Build network frames with the shared normalizer.
  for (size_t i = 0; i < converted.size(); ++i) {
    PreprocessedMotion& pm = converted[i];
    const int t = static_cast<int>(pm.trajectory.rows());
    const Eigen::Vector3d first = pm.trajectory.row(0).transpose();
    pm.net_frames.resize(t, 3 * prepared.normalizer.joint_count);
    for (int r = 0; r < t; ++r) {
      pm.net_frames.row(r) =
          prepared.normalizer
              .to_network(dataset.records[i].frames.row(r).transpose(), first)
              .transpose();
    }
    if (dataset.manifest.entries[i].is_test) {
      prepared.test.push_back(std::move(pm));
    } else {
      prepared.train.push_back(std::move(pm));
    }
  }
  return prepared;
}

}  // namespace motiongen::data
