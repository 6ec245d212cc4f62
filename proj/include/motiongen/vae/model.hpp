#pragma once

#include <memory>
#include <vector>

#include "motiongen/data/preprocess.hpp"
#include "motiongen/lie/kinematics.hpp"
#include "motiongen/nn/layers.hpp"
#include "motiongen/vae/config.hpp"

namespace motiongen::vae {

using nn::Tensor;

/// Recognition-style network shared by the posterior and the prior: a
/// linear encoder into a GRU, with linear mean / log-variance heads.
/// The two instances have identical structure but independent parameters.
struct EncoderHead {
  nn::LinearLayer encoder;  // (D + C + 1) -> encoder_out
  nn::GruCell gru;          // encoder_out -> hidden
  nn::LinearLayer mu_net;
  nn::LinearLayer logvar_net;

  static EncoderHead init(const VaeConfig& config, nn::RandomStream& rng);
  void collect(const std::string& prefix, std::vector<nn::NamedTensor>& out) const;
};

/// Decoder: encodes [prev pose, action, time, z], runs the GRU stack,
/// emits pose_dim values split into Lie parameters (refined by one more
/// linear layer) and the root translation code.
struct GeneratorNet {
  nn::LinearLayer encoder;  // (D + C + 1 + Z) -> encoder_out
  std::vector<nn::GruCell> gru_stack;
  nn::LinearLayer decoder;     // hidden -> D (= 3N Lie values + 3 root)
  nn::LinearLayer lie_output;  // (D - 3) -> (D - 3)

  static GeneratorNet init(const VaeConfig& config, nn::RandomStream& rng);
  void collect(const std::string& prefix, std::vector<nn::NamedTensor>& out) const;
};

struct VaeModel {
  VaeConfig config;
  EncoderHead posterior;
  EncoderHead prior;
  GeneratorNet generator;
  data::PoseNormalizer normalizer;

  static VaeModel init(const VaeConfig& config, nn::RandomStream& rng);
  std::vector<nn::NamedTensor> named_parameters() const;
  std::vector<Tensor> parameters() const;
  void zero_grads();
};

/// Recurrent hidden states plus the running time index for one sequence.
struct GenerationState {
  Tensor posterior_h;
  Tensor prior_h;
  std::vector<Tensor> generator_h;
  Tensor prev_pose;  // network-space pose fed back during generation
  int t = 0;

  static GenerationState initial(const VaeModel& model);
};

struct GaussParams {
  Tensor mu;
  Tensor logvar;
};

Tensor one_hot(int id, int count);

// Advances the posterior on the ground-truth pose p_t; c_t = t / T.
GaussParams posterior_step(const VaeModel& model, GenerationState& state,
                           const Tensor& pose_t, const Tensor& action, double c_t);

// Advances the prior on the previous pose (zero vector at t = 1).
GaussParams prior_step(const VaeModel& model, GenerationState& state,
                       const Tensor& prev_pose, const Tensor& action, double c_t);

struct GeneratorOutput {
  Tensor lie_params;  // 1 x 3N, raw network output after the refinement layer
  Tensor root_code;   // 1 x 3, normalized trajectory code
  Tensor pose;        // 1 x D network-space pose (FK offsets + root code)
};

// Tensor-level generator step used by both training and generation.
GeneratorOutput generator_step_t(const VaeModel& model, GenerationState& state,
                                 const Tensor& prev_pose, const Tensor& action,
                                 double c_t, const Tensor& z,
                                 std::shared_ptr<const lie::Skeleton> skeleton);

// Inference surface: decodes one frame to a canonicalized LiePose and the
// world-space JointPose (sequence anchored at `anchor`).
std::pair<lie::LiePose, lie::JointPose> generator_step(
    const VaeModel& model, GenerationState& state, const Eigen::VectorXd& prev_pose,
    int action_id, double c_t, const Eigen::VectorXd& z, const lie::Skeleton& skeleton,
    const Eigen::Vector3d& anchor = Eigen::Vector3d::Zero());

}  // namespace motiongen::vae
