#pragma once

#include <string>

#include "motiongen/data/motion_file.hpp"
#include "motiongen/lie/skeleton.hpp"

namespace motiongen::render {

/// Orthographic film-strip rendering: every `frame_step`-th frame is
/// projected onto the x/y plane and drawn as one panel, left to right.
/// Output is deterministic SVG text.
std::string svg_strip(const data::MotionRecord& motion, const lie::Skeleton& skeleton,
                      int frame_step, int panel_height = 220);

void save_svg_strip(const std::string& path, const data::MotionRecord& motion,
                    const lie::Skeleton& skeleton, int frame_step,
                    int panel_height = 220);

}  // namespace motiongen::render
