#include "motiongen/vae/config.hpp"

#include <fstream>
#include <sstream>

#include "motiongen/common.hpp"

namespace motiongen::vae {

void VaeConfig::validate() const {
  if (pose_dim < 6) throw ValidationError("pose_dim must cover at least two joints");
  if (action_count < 1) throw ValidationError("action_count must be positive");
  if (latent_dim < 1 || hidden_dim < 1 || encoder_out < 1) {
    throw ValidationError("network dimensions must be positive");
  }
  if (teacher_forcing_rate < 0.0 || teacher_forcing_rate > 1.0) {
    throw ValidationError("teacher_forcing_rate must lie in [0, 1]");
  }
  if (lambda_kl < 0.0) throw ValidationError("lambda_kl must be non-negative");
  if (sequence_length < 1) throw ValidationError("sequence_length must be positive");
  if (generator_gru_layers < 1) throw ValidationError("generator needs at least one GRU layer");
}

void TrainConfig::validate() const {
  // pose_dim and action_count are bound from the dataset later; stand-ins
  // keep the rest of the model config checkable here.
  VaeConfig m = model;
  if (m.pose_dim == 0) m.pose_dim = 6;
  if (m.action_count == 0) m.action_count = 1;
  m.validate();
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
  if (weight_decay < 0.0) throw ValidationError("weight_decay must be non-negative");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
    throw ValidationError("adam betas must lie in [0, 1)");
  }
  if (batch_size < 1) throw ValidationError("batch_size must be positive");
  if (steps < 1) throw ValidationError("steps must be positive");
  if (checkpoint_every < 1) throw ValidationError("checkpoint_every must be positive");
  if (log_every < 1) throw ValidationError("log_every must be positive");
}

std::string train_config_text(const TrainConfig& c) {
  std::ostringstream os;
  os << "trainconfig 1\n";
  os << "seed " << c.seed << "\n";
  os << "latent_dim " << c.model.latent_dim << "\n";
  os << "hidden_dim " << c.model.hidden_dim << "\n";
  os << "encoder_out " << c.model.encoder_out << "\n";
  os << "lambda_kl " << format_double(c.model.lambda_kl) << "\n";
  os << "teacher_forcing " << format_double(c.model.teacher_forcing_rate) << "\n";
  os << "sequence_length " << c.model.sequence_length << "\n";
  os << "generator_gru_layers " << c.model.generator_gru_layers << "\n";
  os << "learning_rate " << format_double(c.learning_rate) << "\n";
  os << "weight_decay " << format_double(c.weight_decay) << "\n";
  os << "beta1 " << format_double(c.beta1) << "\n";
  os << "beta2 " << format_double(c.beta2) << "\n";
  os << "batch_size " << c.batch_size << "\n";
  os << "steps " << c.steps << "\n";
  os << "checkpoint_every " << c.checkpoint_every << "\n";
  os << "log_every " << c.log_every << "\n";
  return os.str();
}

TrainConfig train_config_from_text(const std::string& text, const std::string& origin) {
  TrainConfig c;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  bool have_magic = false;
  while (std::getline(is, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    const std::string at = origin + ":" + std::to_string(line_no);
    if (!have_magic) {
      if (toks.size() != 2 || toks[0] != "trainconfig" || toks[1] != "1") {
        throw ValidationError(at + ": expected 'trainconfig 1' header");
      }
      have_magic = true;
      continue;
    }
    if (toks.size() != 2) throw ValidationError(at + ": expected 'key value'");
    const std::string& key = toks[0];
    const std::string& val = toks[1];
    if (key == "seed") {
      c.seed = static_cast<uint64_t>(parse_int(val, at));
    } else if (key == "latent_dim") {
      c.model.latent_dim = static_cast<int>(parse_int(val, at));
    } else if (key == "hidden_dim") {
      c.model.hidden_dim = static_cast<int>(parse_int(val, at));
    } else if (key == "encoder_out") {
      c.model.encoder_out = static_cast<int>(parse_int(val, at));
    } else if (key == "lambda_kl") {
      c.model.lambda_kl = parse_double(val, at);
    } else if (key == "teacher_forcing") {
      c.model.teacher_forcing_rate = parse_double(val, at);
    } else if (key == "sequence_length") {
      c.model.sequence_length = static_cast<int>(parse_int(val, at));
    } else if (key == "generator_gru_layers") {
      c.model.generator_gru_layers = static_cast<int>(parse_int(val, at));
    } else if (key == "learning_rate") {
      c.learning_rate = parse_double(val, at);
    } else if (key == "weight_decay") {
      c.weight_decay = parse_double(val, at);
    } else if (key == "beta1") {
      c.beta1 = parse_double(val, at);
    } else if (key == "beta2") {
      c.beta2 = parse_double(val, at);
    } else if (key == "batch_size") {
      c.batch_size = static_cast<int>(parse_int(val, at));
    } else if (key == "steps") {
      c.steps = static_cast<int>(parse_int(val, at));
    } else if (key == "checkpoint_every") {
      c.checkpoint_every = static_cast<int>(parse_int(val, at));
    } else if (key == "log_every") {
      c.log_every = static_cast<int>(parse_int(val, at));
    } else {
      throw ValidationError(at + ": unknown key '" + key + "'");
    }
  }
  return c;
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return train_config_from_text(os.str(), path);
}

void save_train_config(const std::string& path, const TrainConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << train_config_text(config);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace motiongen::vae
