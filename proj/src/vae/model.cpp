#include "motiongen/vae/model.hpp"

#include "motiongen/common.hpp"
#include "motiongen/nn/lie_ops.hpp"
#include "motiongen/nn/ops.hpp"

namespace motiongen::vae {

using nn::GruCell;
using nn::LinearLayer;

EncoderHead EncoderHead::init(const VaeConfig& config, nn::RandomStream& rng) {
  EncoderHead head;
  const int in = config.pose_dim + config.action_count + 1;
  head.encoder = LinearLayer::init(in, config.encoder_out, rng);
  head.gru = GruCell::init(config.encoder_out, config.hidden_dim, rng);
  head.mu_net = LinearLayer::init(config.hidden_dim, config.latent_dim, rng);
  head.logvar_net = LinearLayer::init(config.hidden_dim, config.latent_dim, rng);
  return head;
}

void EncoderHead::collect(const std::string& prefix, std::vector<nn::NamedTensor>& out) const {
  encoder.collect(prefix + ".encoder", out);
  gru.collect(prefix + ".gru", out);
  mu_net.collect(prefix + ".mu_net", out);
  logvar_net.collect(prefix + ".logvar_net", out);
}

GeneratorNet GeneratorNet::init(const VaeConfig& config, nn::RandomStream& rng) {
  GeneratorNet net;
  const int in = config.pose_dim + config.action_count + 1 + config.latent_dim;
  net.encoder = LinearLayer::init(in, config.encoder_out, rng);
  net.gru_stack.reserve(config.generator_gru_layers);
  for (int i = 0; i < config.generator_gru_layers; ++i) {
    const int cell_in = i == 0 ? config.encoder_out : config.hidden_dim;
    net.gru_stack.push_back(GruCell::init(cell_in, config.hidden_dim, rng));
  }
  net.decoder = LinearLayer::init(config.hidden_dim, config.pose_dim, rng);
  net.lie_output = LinearLayer::init(config.pose_dim - 3, config.pose_dim - 3, rng);
  return net;
}

void GeneratorNet::collect(const std::string& prefix, std::vector<nn::NamedTensor>& out) const {
  encoder.collect(prefix + ".encoder", out);
  for (size_t i = 0; i < gru_stack.size(); ++i) {
    gru_stack[i].collect(prefix + ".gru" + std::to_string(i), out);
  }
  decoder.collect(prefix + ".decoder", out);
  lie_output.collect(prefix + ".lie_output", out);
}

VaeModel VaeModel::init(const VaeConfig& config, nn::RandomStream& rng) {
  config.validate();
  VaeModel model;
  model.config = config;
  model.posterior = EncoderHead::init(config, rng);
  model.prior = EncoderHead::init(config, rng);
  model.generator = GeneratorNet::init(config, rng);
  model.normalizer.joint_count = config.pose_dim / 3;
  return model;
}

std::vector<nn::NamedTensor> VaeModel::named_parameters() const {
  std::vector<nn::NamedTensor> out;
  posterior.collect("posterior", out);
  prior.collect("prior", out);
  generator.collect("generator", out);
  return out;
}

std::vector<Tensor> VaeModel::parameters() const {
  std::vector<Tensor> out;
  for (auto& nt : named_parameters()) out.push_back(nt.tensor);
  return out;
}

void VaeModel::zero_grads() {
  for (auto& p : parameters()) p.zero_grad();
}

GenerationState GenerationState::initial(const VaeModel& model) {
  GenerationState state;
  state.posterior_h = Tensor(1, model.config.hidden_dim);
  state.prior_h = Tensor(1, model.config.hidden_dim);
  state.generator_h.assign(model.config.generator_gru_layers,
                           Tensor(1, model.config.hidden_dim));
  for (auto& h : state.generator_h) h = Tensor(1, model.config.hidden_dim);
  state.prev_pose = Tensor(1, model.config.pose_dim);
  state.t = 0;
  return state;
}

Tensor one_hot(int id, int count) {
  if (id < 0 || id >= count) throw ValidationError("one_hot: index out of range");
  Tensor t(1, count);
  t.value()(0, id) = 1.0;
  return t;
}

namespace {

Tensor encoder_input(const Tensor& pose, const Tensor& action, double c_t) {
  return nn::concat({pose, action, Tensor::scalar(c_t)});
}

GaussParams head_step(const EncoderHead& head, Tensor& hidden, const Tensor& pose,
                      const Tensor& action, double c_t) {
  Tensor x = head.encoder.forward(encoder_input(pose, action, c_t));
  hidden = nn::gru_step(head.gru, x, hidden);
  return GaussParams{head.mu_net.forward(hidden), head.logvar_net.forward(hidden)};
}

}  // namespace

GaussParams posterior_step(const VaeModel& model, GenerationState& state,
                           const Tensor& pose_t, const Tensor& action, double c_t) {
  if (pose_t.cols() != model.config.pose_dim || action.cols() != model.config.action_count) {
    throw ValidationError("posterior_step: input dimensions do not match the model");
  }
  return head_step(model.posterior, state.posterior_h, pose_t, action, c_t);
}

GaussParams prior_step(const VaeModel& model, GenerationState& state,
                       const Tensor& prev_pose, const Tensor& action, double c_t) {
  if (prev_pose.cols() != model.config.pose_dim || action.cols() != model.config.action_count) {
    throw ValidationError("prior_step: input dimensions do not match the model");
  }
  return head_step(model.prior, state.prior_h, prev_pose, action, c_t);
}

GeneratorOutput generator_step_t(const VaeModel& model, GenerationState& state,
                                 const Tensor& prev_pose, const Tensor& action,
                                 double c_t, const Tensor& z,
                                 std::shared_ptr<const lie::Skeleton> skeleton) {
  const VaeConfig& cfg = model.config;
  if (prev_pose.cols() != cfg.pose_dim || z.cols() != cfg.latent_dim) {
    throw ValidationError("generator_step: input dimensions do not match the model");
  }
  if (3 * skeleton->joint_count() != cfg.pose_dim ||
      3 * skeleton->bone_count() != cfg.pose_dim - 3) {
    throw ValidationError("generator_step: skeleton does not match the model's pose size");
  }
  Tensor g = nn::concat({prev_pose, action, Tensor::scalar(c_t), z});
  Tensor h = model.generator.encoder.forward(g);
  for (size_t i = 0; i < model.generator.gru_stack.size(); ++i) {
    state.generator_h[i] = nn::gru_step(model.generator.gru_stack[i], h, state.generator_h[i]);
    h = state.generator_h[i];
  }
  Tensor decoded = model.generator.decoder.forward(h);
  Tensor lie_block = nn::slice_cols(decoded, 0, cfg.pose_dim - 3);
  Tensor root_code = nn::slice_cols(decoded, cfg.pose_dim - 3, 3);
  Tensor lie_refined = model.generator.lie_output.forward(lie_block);

  Tensor offsets = nn::fk_offsets(lie_refined, std::move(skeleton));
  Tensor pose = nn::add(offsets, nn::embed_cols(root_code, cfg.pose_dim,
                                                3 * model.normalizer.root_index));
  return GeneratorOutput{lie_refined, root_code, pose};
}

std::pair<lie::LiePose, lie::JointPose> generator_step(
    const VaeModel& model, GenerationState& state, const Eigen::VectorXd& prev_pose,
    int action_id, double c_t, const Eigen::VectorXd& z, const lie::Skeleton& skeleton,
    const Eigen::Vector3d& anchor) {
  Tensor prev = Tensor::from_matrix(prev_pose.transpose());
  Tensor zt = Tensor::from_matrix(z.transpose());
  const Tensor action = one_hot(action_id, model.config.action_count);
  auto skeleton_ptr = std::make_shared<const lie::Skeleton>(skeleton);
  GeneratorOutput out =
      generator_step_t(model, state, prev, action, c_t, zt, skeleton_ptr);

  const Eigen::Vector3d root_world =
      model.normalizer.root_world(out.pose.value().row(0).transpose(), anchor);
  lie::LiePose lie_pose =
      lie::LiePose::from_flat(out.lie_params.value().row(0).transpose(), root_world)
          .canonicalized();
  lie::JointPose joints = lie::JointPose::from_flat(
      model.normalizer.to_world(out.pose.value().row(0).transpose(), anchor));
  return {std::move(lie_pose), std::move(joints)};
}

}  // namespace motiongen::vae
