#pragma once

#include <optional>
#include <string>
#include <vector>

#include "motiongen/nn/adam.hpp"
#include "motiongen/nn/checkpoint.hpp"
#include "motiongen/vae/config.hpp"
#include "motiongen/vae/model.hpp"

namespace motiongen::vae {

/// Everything needed to resume or use a training run: model parameters
/// and normalizer, the skeleton, the action vocabulary, the full train
/// configuration, optimizer state, step count, and the RNG stream state.
struct VaeCheckpoint {
  VaeModel model;
  std::vector<std::string> action_names;
  lie::Skeleton skeleton;
  TrainConfig train_config;
  long step = 0;
  std::string rng_state;
  std::optional<nn::AdamState> optimizer;  // absent on export-only saves
  std::string config_hash;
};

void save_vae_checkpoint(const std::string& path, const VaeModel& model,
                         const std::vector<std::string>& action_names,
                         const lie::Skeleton& skeleton, const TrainConfig& train_config,
                         long step, const std::string& rng_state,
                         const nn::AdamState* optimizer, const std::string& config_hash);

VaeCheckpoint load_vae_checkpoint(const std::string& path);

}  // namespace motiongen::vae
