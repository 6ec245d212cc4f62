#include "motiongen/vae/generate.hpp"

#include "motiongen/common.hpp"
#include "motiongen/nn/gaussian.hpp"

namespace motiongen::vae {

namespace {

// Shared sampling loop; fills network-space frames and, when requested,
// the raw Lie parameters emitted by the decoder.
nn::Matrix run_generation(const VaeModel& model, int action_id, int length,
                          std::shared_ptr<const lie::Skeleton> skeleton,
                          nn::RandomStream& rng, nn::Matrix* lie_out) {
  if (length < 1) throw ValidationError("generate: length must be positive");
  const VaeConfig& cfg = model.config;
  const Tensor action = one_hot(action_id, cfg.action_count);

  nn::Matrix frames(length, cfg.pose_dim);
  if (lie_out) lie_out->resize(length, cfg.pose_dim - 3);
  GenerationState state = GenerationState::initial(model);
  Tensor prev(1, cfg.pose_dim);
  for (int t = 1; t <= length; ++t) {
    const double c_t = static_cast<double>(t) / static_cast<double>(length);
    GaussParams prior = prior_step(model, state, prev, action, c_t);
    Tensor z = nn::reparameterize(prior.mu, prior.logvar, rng);
    GeneratorOutput out = generator_step_t(model, state, prev, action, c_t, z, skeleton);
    frames.row(t - 1) = out.pose.value().row(0);
    if (lie_out) lie_out->row(t - 1) = out.lie_params.value().row(0);
    prev = out.pose;
  }
  return frames;
}

}  // namespace

nn::Matrix generate_net_frames(const VaeModel& model, int action_id, int length,
                               std::shared_ptr<const lie::Skeleton> skeleton,
                               nn::RandomStream& rng) {
  return run_generation(model, action_id, length, std::move(skeleton), rng, nullptr);
}

GeneratedMotion generate(const VaeModel& model, int action_id,
                         const std::string& action_label, int length,
                         const lie::Skeleton& skeleton, nn::RandomStream& rng,
                         double fps) {
  auto skeleton_ptr = std::make_shared<const lie::Skeleton>(skeleton);
  nn::Matrix lie_raw;
  const nn::Matrix net =
      run_generation(model, action_id, length, skeleton_ptr, rng, &lie_raw);
  const data::PoseNormalizer& norm = model.normalizer;
  const Eigen::Vector3d anchor = Eigen::Vector3d::Zero();

  GeneratedMotion out;
  out.joints.action_label = action_label;
  out.joints.action_id = action_id;
  out.joints.skeleton_name = skeleton.name();
  out.joints.fps = fps;
  out.joints.joint_count = skeleton.joint_count();
  out.joints.frames.resize(length, 3 * skeleton.joint_count());

  out.lie.action_label = action_label;
  out.lie.skeleton_name = skeleton.name();
  out.lie.fps = fps;
  out.lie.bone_count = skeleton.bone_count();
  out.lie.frames.resize(length, 3 + 3 * skeleton.bone_count());

  out.trajectory.resize(length, 3);

  for (int t = 0; t < length; ++t) {
    const Eigen::VectorXd world = norm.to_world(net.row(t).transpose(), anchor);
    out.joints.frames.row(t) = world.transpose();
    const Eigen::Vector3d root = world.segment<3>(3 * norm.root_index);
    out.trajectory.row(t) = root.transpose();

    const lie::LiePose lie_pose =
        lie::LiePose::from_flat(lie_raw.row(t).transpose(), root).canonicalized();
    out.lie.frames(t, 0) = root.x();
    out.lie.frames(t, 1) = root.y();
    out.lie.frames(t, 2) = root.z();
    out.lie.frames.row(t).segment(3, 3 * skeleton.bone_count()) =
        lie_pose.omega_flat().transpose();
  }
  return out;
}

}  // namespace motiongen::vae
