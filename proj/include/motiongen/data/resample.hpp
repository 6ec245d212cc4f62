#pragma once

#include "motiongen/data/motion_file.hpp"

namespace motiongen::data {

// Linear interpolation of joint positions at uniformly spaced target
// timestamps covering the original duration. The first and last frames
// are copied exactly.
MotionRecord resample(const MotionRecord& motion, double target_fps);

}  // namespace motiongen::data
