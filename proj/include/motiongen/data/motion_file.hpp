#pragma once

#include <string>
#include <utility>
#include <vector>

#include "motiongen/nn/tensor.hpp"

namespace motiongen::data {

using nn::Matrix;

/// A labeled motion clip: T frames of 3J world joint coordinates
/// (meters, joint-major). `extra` carries optional header fields such as
/// the seed and config hash stamped on generated outputs.
struct MotionRecord {
  std::string action_label;
  int action_id = -1;  // resolved against a manifest vocabulary when known
  std::string skeleton_name = "default";
  double fps = 12.0;
  int joint_count = 0;
  Matrix frames;  // T x 3J
  std::vector<std::pair<std::string, std::string>> extra;

  int frame_count() const { return static_cast<int>(frames.rows()); }
};

/// The Lie-parameter form of a clip: per frame, the root translation
/// followed by 3N bone parameters.
struct LieMotionRecord {
  std::string action_label;
  std::string skeleton_name = "default";
  double fps = 12.0;
  int bone_count = 0;
  Matrix frames;  // T x (3 + 3N): [root | omegas]
  std::vector<std::pair<std::string, std::string>> extra;

  int frame_count() const { return static_cast<int>(frames.rows()); }
};

// Text container with a key/value header and one frame per line, every
// value rendered with shortest round-trip precision so that a
// save/load/save cycle is byte identical.
void save_motion(const std::string& path, const MotionRecord& record);
MotionRecord load_motion(const std::string& path);

void save_lie_motion(const std::string& path, const LieMotionRecord& record);
LieMotionRecord load_lie_motion(const std::string& path);

}  // namespace motiongen::data
