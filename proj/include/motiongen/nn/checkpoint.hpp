#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "motiongen/nn/tensor.hpp"

namespace motiongen::nn {

/// Versioned binary container for a trained model: string metadata,
/// named parameter tensors, optional optimizer moments aligned with the
/// tensor list, and the RNG state. All integers and doubles are written
/// little-endian in a fixed field order, so files are byte-stable across
/// platforms.
struct CheckpointData {
  std::map<std::string, std::string> meta;  // sorted keys -> stable layout
  std::vector<std::pair<std::string, Matrix>> tensors;
  bool has_optimizer = false;
  long optimizer_step = 0;
  std::vector<Matrix> optimizer_m;
  std::vector<Matrix> optimizer_v;
  std::string rng_state;

  const Matrix& tensor(const std::string& name) const;
  const std::string& meta_value(const std::string& key) const;
};

void write_checkpoint(const std::string& path, const CheckpointData& data);
CheckpointData read_checkpoint(const std::string& path);

}  // namespace motiongen::nn
