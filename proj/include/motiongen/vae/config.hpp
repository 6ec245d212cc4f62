#pragma once

#include <cstdint>
#include <string>

namespace motiongen::vae {

/// Model hyperparameters. pose_dim and action_count come from the data;
/// the remaining defaults follow the reference configuration.
struct VaeConfig {
  int pose_dim = 0;      // D = 3 * joint count
  int action_count = 0;  // C
  int latent_dim = 30;
  int hidden_dim = 128;
  int encoder_out = 128;
  double lambda_kl = 0.1;
  double teacher_forcing_rate = 0.6;
  int sequence_length = 60;  // default generation length
  int generator_gru_layers = 2;

  void validate() const;
};

/// Full training run configuration: model plus optimizer and loop
/// parameters, loadable from a key-value text file.
struct TrainConfig {
  VaeConfig model;
  uint64_t seed = 1;
  double learning_rate = 2e-4;
  double weight_decay = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  int batch_size = 16;
  int steps = 3000;
  int checkpoint_every = 1000;
  int log_every = 50;

  void validate() const;
};

TrainConfig load_train_config(const std::string& path);
void save_train_config(const std::string& path, const TrainConfig& config);

// Canonical rendering used for hashing and checkpoint metadata.
std::string train_config_text(const TrainConfig& config);
TrainConfig train_config_from_text(const std::string& text, const std::string& origin);

}  // namespace motiongen::vae
