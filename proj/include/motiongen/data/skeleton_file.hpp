#pragma once

#include <string>

#include "motiongen/lie/skeleton.hpp"

namespace motiongen::data {

// Structured-text skeleton schema: joints (index, name), the root index,
// chains as ordered joint-index lists, and bone lengths keyed by
// (parent, child). Parsing reports the offending line on failure.
lie::Skeleton load_skeleton(const std::string& path);
void save_skeleton(const std::string& path, const lie::Skeleton& skeleton);

std::string skeleton_to_text(const lie::Skeleton& skeleton);
lie::Skeleton skeleton_from_text(const std::string& text, const std::string& origin);

// The built-in 21-joint, 20-bone human skeleton with five chains (spine,
// both arms, both legs) rooted at the pelvis. Bone lengths are design
// constants in plausible anatomical ranges.
lie::Skeleton default_skeleton();

}  // namespace motiongen::data
