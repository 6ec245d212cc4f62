#include "motiongen/vae/checkpoint.hpp"

#include <sstream>

#include "motiongen/common.hpp"
#include "motiongen/data/skeleton_file.hpp"

namespace motiongen::vae {

namespace {

std::string normalizer_text(const data::PoseNormalizer& n) {
  std::ostringstream os;
  os << n.root_index << " " << n.joint_count;
  for (int i = 0; i < 3; ++i) os << " " << format_double(n.traj_mean[i]);
  for (int i = 0; i < 3; ++i) os << " " << format_double(n.traj_std[i]);
  return os.str();
}

data::PoseNormalizer normalizer_from_text(const std::string& text) {
  const auto toks = split_ws(text);
  if (toks.size() != 8) throw ValidationError("malformed normalizer metadata");
  data::PoseNormalizer n;
  n.root_index = static_cast<int>(parse_int(toks[0], "normalizer"));
  n.joint_count = static_cast<int>(parse_int(toks[1], "normalizer"));
  for (int i = 0; i < 3; ++i) n.traj_mean[i] = parse_double(toks[2 + i], "normalizer");
  for (int i = 0; i < 3; ++i) n.traj_std[i] = parse_double(toks[5 + i], "normalizer");
  return n;
}

std::string actions_text(const std::vector<std::string>& names) {
  std::ostringstream os;
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) os << " ";
    os << names[i];
  }
  return os.str();
}

}  // namespace

void save_vae_checkpoint(const std::string& path, const VaeModel& model,
                         const std::vector<std::string>& action_names,
                         const lie::Skeleton& skeleton, const TrainConfig& train_config,
                         long step, const std::string& rng_state,
                         const nn::AdamState* optimizer, const std::string& config_hash) {
  nn::CheckpointData data;
  data.meta["kind"] = "vae";
  data.meta["actions"] = actions_text(action_names);
  data.meta["skeleton"] = data::skeleton_to_text(skeleton);
  data.meta["train_config"] = train_config_text(train_config);
  data.meta["pose_dim"] = std::to_string(model.config.pose_dim);
  data.meta["action_count"] = std::to_string(model.config.action_count);
  data.meta["normalizer"] = normalizer_text(model.normalizer);
  data.meta["step"] = std::to_string(step);
  data.meta["config_hash"] = config_hash;
  for (const auto& nt : model.named_parameters()) {
    data.tensors.emplace_back(nt.name, nt.tensor.value());
  }
  if (optimizer) {
    data.has_optimizer = true;
    data.optimizer_step = optimizer->step;
    data.optimizer_m = optimizer->m;
    data.optimizer_v = optimizer->v;
  }
  data.rng_state = rng_state;
  nn::write_checkpoint(path, data);
}

VaeCheckpoint load_vae_checkpoint(const std::string& path) {
  const nn::CheckpointData data = nn::read_checkpoint(path);
  if (data.meta_value("kind") != "vae") {
    throw ValidationError("'" + path + "' is not a model checkpoint");
  }
  VaeCheckpoint ckpt;
  ckpt.train_config = train_config_from_text(data.meta_value("train_config"), path);
  ckpt.skeleton = data::skeleton_from_text(data.meta_value("skeleton"), path);
  ckpt.action_names = split_ws(data.meta_value("actions"));
  ckpt.step = parse_int(data.meta_value("step"), path);
  ckpt.config_hash = data.meta_value("config_hash");
  ckpt.rng_state = data.rng_state;

  VaeConfig model_config = ckpt.train_config.model;
  model_config.pose_dim = static_cast<int>(parse_int(data.meta_value("pose_dim"), path));
  model_config.action_count =
      static_cast<int>(parse_int(data.meta_value("action_count"), path));
  nn::RandomStream init_rng(0);
  ckpt.model = VaeModel::init(model_config, init_rng);
  ckpt.model.normalizer = normalizer_from_text(data.meta_value("normalizer"));

  auto named = ckpt.model.named_parameters();
  if (named.size() != data.tensors.size()) {
    throw ValidationError(path + ": parameter list does not match the model layout");
  }
  for (size_t i = 0; i < named.size(); ++i) {
    if (named[i].name != data.tensors[i].first) {
      throw ValidationError(path + ": unexpected tensor '" + data.tensors[i].first + "'");
    }
    const nn::Matrix& m = data.tensors[i].second;
    if (m.rows() != named[i].tensor.rows() || m.cols() != named[i].tensor.cols()) {
      throw ValidationError(path + ": tensor '" + named[i].name + "' has the wrong shape");
    }
    named[i].tensor.value() = m;
  }
  if (data.has_optimizer) {
    nn::AdamState state = nn::AdamState::init(
        ckpt.model.parameters(),
        nn::AdamConfig{ckpt.train_config.learning_rate, ckpt.train_config.beta1,
                       ckpt.train_config.beta2, 1e-8, ckpt.train_config.weight_decay});
    state.step = data.optimizer_step;
    state.m = data.optimizer_m;
    state.v = data.optimizer_v;
    ckpt.optimizer = std::move(state);
  }
  return ckpt;
}

}  // namespace motiongen::vae
