#pragma once

#include <functional>
#include <memory>
#include <string>

#include "motiongen/nn/adam.hpp"
#include "motiongen/vae/model.hpp"

namespace motiongen::vae {

struct SequenceLoss {
  double loss = 0.0;       // sum over frames of recon + lambda * KL
  double recon_sum = 0.0;  // squared error summed over frames
  double kl_sum = 0.0;
  int frames = 0;
  bool teacher_forced = false;

  double recon_per_frame() const { return recon_sum / frames; }
};

// One sequence of the objective: the posterior always sees the real pose
// p_t, the prior always sees the real p_{t-1} (zero at t = 1), and a
// single Bernoulli(p_tf) draw decides whether the generator is fed real
// or its own previous poses for the whole sequence. Accumulates
// gradients for all three networks into the model parameters; callers
// zero or average them across a batch. Throws TrainingDiverged when the
// loss goes non-finite.
SequenceLoss train_sequence(VaeModel& model, const data::PreprocessedMotion& motion,
                            std::shared_ptr<const lie::Skeleton> skeleton,
                            nn::RandomStream& rng);

struct TrainStats {
  long step = 0;
  double loss = 0.0;            // batch mean sequence loss
  double recon_per_frame = 0.0;
  double kl_per_frame = 0.0;
};

/// Minibatch training loop with gradient accumulation over sequences.
class Trainer {
 public:
  Trainer(const TrainConfig& config, const data::PreparedDataset& dataset);

  // One optimizer step over a sampled minibatch.
  TrainStats step();

  long current_step() const { return step_; }
  VaeModel& model() { return model_; }
  const VaeModel& model() const { return model_; }
  const nn::AdamState& optimizer() const { return adam_; }
  nn::RandomStream& rng() { return rng_; }
  const TrainConfig& config() const { return config_; }

  // Restores the exact mid-run state captured by a checkpoint.
  void restore(VaeModel model, nn::AdamState adam, long step, const std::string& rng_state);

 private:
  TrainConfig config_;
  const data::PreparedDataset& dataset_;
  nn::RandomStream rng_;  // initialized before the model it seeds
  VaeModel model_;
  nn::AdamState adam_;
  long step_ = 0;
};

}  // namespace motiongen::vae
