#include "motiongen/data/resample.hpp"

#include <cmath>

#include "motiongen/common.hpp"

namespace motiongen::data {

MotionRecord resample(const MotionRecord& motion, double target_fps) {
  if (!(target_fps > 0.0)) throw ValidationError("target fps must be positive");
  const int t_in = motion.frame_count();
  MotionRecord out = motion;
  out.fps = target_fps;
  if (t_in == 1) return out;

  const double duration = static_cast<double>(t_in - 1) / motion.fps;
  const int t_out = std::max(2, static_cast<int>(std::lround(duration * target_fps)) + 1);
  const double step = duration / static_cast<double>(t_out - 1);

  out.frames.resize(t_out, motion.frames.cols());
  out.frames.row(0) = motion.frames.row(0);
  out.frames.row(t_out - 1) = motion.frames.row(t_in - 1);
  for (int i = 1; i < t_out - 1; ++i) {
    const double t = step * i * motion.fps;  // position in source frame units
    const double nearest = std::round(t);
    if (std::abs(t - nearest) < 1e-9) {
      // Lands on a source frame; copy it exactly.
      out.frames.row(i) = motion.frames.row(static_cast<int>(nearest));
      continue;
    }
    const int lo = std::min(t_in - 2, static_cast<int>(std::floor(t)));
    const double alpha = t - lo;
    out.frames.row(i) =
        (1.0 - alpha) * motion.frames.row(lo) + alpha * motion.frames.row(lo + 1);
  }
  return out;
}

}  // namespace motiongen::data
