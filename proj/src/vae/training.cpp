#include "motiongen/vae/training.hpp"

#include <cmath>
#include <sstream>

#include "motiongen/common.hpp"
#include "motiongen/nn/gaussian.hpp"
#include "motiongen/nn/ops.hpp"

namespace motiongen::vae {

SequenceLoss train_sequence(VaeModel& model, const data::PreprocessedMotion& motion,
                            std::shared_ptr<const lie::Skeleton> skeleton,
                            nn::RandomStream& rng) {
  const int t_count = static_cast<int>(motion.net_frames.rows());
  if (t_count < 1) throw ValidationError("train_sequence: empty motion");
  if (motion.net_frames.cols() != model.config.pose_dim) {
    throw ValidationError("train_sequence: pose width does not match the model");
  }

  SequenceLoss result;
  result.frames = t_count;
  result.teacher_forced = rng.bernoulli(model.config.teacher_forcing_rate);

  const Tensor action = one_hot(motion.action_id, model.config.action_count);
  const double lambda = model.config.lambda_kl;

  nn::Tape tape;
  nn::TapeScope scope(tape);

  GenerationState state = GenerationState::initial(model);
  Tensor prev_real(1, model.config.pose_dim);
  Tensor prev_generated(1, model.config.pose_dim);
  Tensor total = Tensor::scalar(0.0);

  for (int t = 1; t <= t_count; ++t) {
    const double c_t = static_cast<double>(t) / static_cast<double>(t_count);
    Tensor pose_t =
        Tensor::from_matrix(motion.net_frames.row(t - 1));

    GaussParams post = posterior_step(model, state, pose_t, action, c_t);
    GaussParams prior = prior_step(model, state, prev_real, action, c_t);
    Tensor z = nn::reparameterize(post.mu, post.logvar, rng);

    const Tensor& generator_prev = result.teacher_forced ? prev_real : prev_generated;
    GeneratorOutput out =
        generator_step_t(model, state, generator_prev, action, c_t, z, skeleton);

    Tensor recon = nn::squared_error(out.pose, pose_t);
    Tensor kl = nn::gaussian_kl(post.mu, post.logvar, prior.mu, prior.logvar);
    result.recon_sum += recon.item();
    result.kl_sum += kl.item();
    total = nn::add(total, nn::add(recon, nn::scale(kl, lambda)));

    prev_real = pose_t;
    prev_generated = out.pose;
  }

  result.loss = total.item();
  if (!std::isfinite(result.loss)) {
    std::ostringstream os;
    os << "training diverged: loss=" << result.loss << " recon=" << result.recon_sum
       << " kl=" << result.kl_sum << " frames=" << t_count
       << " teacher_forced=" << result.teacher_forced;
    throw TrainingDiverged(os.str());
  }
  tape.backward(total);
  return result;
}

namespace {

VaeConfig config_with_data_dims(const TrainConfig& config,
                                const data::PreparedDataset& dataset) {
  VaeConfig c = config.model;
  c.pose_dim = dataset.pose_dim();
  c.action_count = dataset.action_count();
  return c;
}

}  // namespace

Trainer::Trainer(const TrainConfig& config, const data::PreparedDataset& dataset)
    : config_(config),
      dataset_(dataset),
      rng_(config.seed),
      model_(VaeModel::init(config_with_data_dims(config, dataset), rng_)),
      adam_(nn::AdamState::init(model_.parameters(),
                                nn::AdamConfig{config.learning_rate, config.beta1,
                                               config.beta2, 1e-8, config.weight_decay})) {
  if (dataset_.train.empty()) throw ValidationError("training split is empty");
  model_.normalizer = dataset_.normalizer;
}

TrainStats Trainer::step() {
  const int batch = config_.batch_size;
  model_.zero_grads();
  TrainStats stats;
  for (int b = 0; b < batch; ++b) {
    const int idx = rng_.uniform_int(static_cast<int>(dataset_.train.size()));
    SequenceLoss seq;
    try {
      seq = train_sequence(model_, dataset_.train[idx], dataset_.skeleton, rng_);
    } catch (const TrainingDiverged& e) {
      throw TrainingDiverged("step " + std::to_string(step_ + 1) + ", sequence " +
                             std::to_string(idx) + ": " + e.what());
    }
    stats.loss += seq.loss;
    stats.recon_per_frame += seq.recon_per_frame();
    stats.kl_per_frame += seq.kl_sum / seq.frames;
  }
  stats.loss /= batch;
  stats.recon_per_frame /= batch;
  stats.kl_per_frame /= batch;

  // Mean gradient over the batch.
  auto params = model_.parameters();
  const double inv = 1.0 / static_cast<double>(batch);
  for (auto& p : params) p.grad() *= inv;
  nn::adam_step(params, adam_);
  step_ += 1;
  stats.step = step_;
  return stats;
}

void Trainer::restore(VaeModel model, nn::AdamState adam, long step,
                      const std::string& rng_state) {
  model_ = std::move(model);
  adam_ = std::move(adam);
  step_ = step;
  rng_.load_state(rng_state);
}

}  // namespace motiongen::vae
