#include "motiongen/render/svg_strip.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "motiongen/common.hpp"

namespace motiongen::render {

std::string svg_strip(const data::MotionRecord& motion, const lie::Skeleton& skeleton,
                      int frame_step, int panel_height) {
  if (motion.frame_count() < 1) throw ValidationError("cannot render an empty motion");
  if (frame_step < 1) throw ValidationError("frame step must be positive");
  if (motion.joint_count != skeleton.joint_count()) {
    throw ValidationError("motion joint count does not match the skeleton");
  }

  std::vector<int> panels;
  for (int f = 0; f < motion.frame_count(); f += frame_step) panels.push_back(f);

  // Shared bounds over the selected frames (x/y projection).
  double min_x = 1e300, max_x = -1e300, min_y = 1e300, max_y = -1e300;
  for (int f : panels) {
    for (int j = 0; j < motion.joint_count; ++j) {
      min_x = std::min(min_x, motion.frames(f, 3 * j));
      max_x = std::max(max_x, motion.frames(f, 3 * j));
      min_y = std::min(min_y, motion.frames(f, 3 * j + 1));
      max_y = std::max(max_y, motion.frames(f, 3 * j + 1));
    }
  }
  const double span = std::max({max_x - min_x, max_y - min_y, 1e-6});
  const double margin = 0.08 * span;
  const double scale = (panel_height - 20) / (span + 2 * margin);
  const int panel_width = panel_height;
  const int width = panel_width * static_cast<int>(panels.size());

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << panel_height << "\" viewBox=\"0 0 " << width << " " << panel_height << "\">\n";
  os << "<rect width=\"" << width << "\" height=\"" << panel_height
     << "\" fill=\"#ffffff\"/>\n";

  for (size_t p = 0; p < panels.size(); ++p) {
    const int f = panels[p];
    const double ox = static_cast<double>(p) * panel_width;
    auto sx = [&](double x) { return ox + 10 + (x - min_x + margin) * scale; };
    auto sy = [&](double y) { return panel_height - 10 - (y - min_y + margin) * scale; };
    os << "<g stroke=\"#23426b\" stroke-width=\"2\" fill=\"none\">\n";
    for (const lie::Bone& bone : skeleton.bones()) {
      os << "<line x1=\"" << format_double(sx(motion.frames(f, 3 * bone.parent)))
         << "\" y1=\"" << format_double(sy(motion.frames(f, 3 * bone.parent + 1)))
         << "\" x2=\"" << format_double(sx(motion.frames(f, 3 * bone.child)))
         << "\" y2=\"" << format_double(sy(motion.frames(f, 3 * bone.child + 1)))
         << "\"/>\n";
    }
    os << "</g>\n<g fill=\"#c23b22\">\n";
    for (int j = 0; j < motion.joint_count; ++j) {
      os << "<circle cx=\"" << format_double(sx(motion.frames(f, 3 * j))) << "\" cy=\""
         << format_double(sy(motion.frames(f, 3 * j + 1))) << "\" r=\"2.2\"/>\n";
    }
    os << "</g>\n";
    os << "<text x=\"" << format_double(ox + 8) << "\" y=\"14\" font-family=\"monospace\""
       << " font-size=\"11\" fill=\"#555555\">t=" << f << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void save_svg_strip(const std::string& path, const data::MotionRecord& motion,
                    const lie::Skeleton& skeleton, int frame_step, int panel_height) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << svg_strip(motion, skeleton, frame_step, panel_height);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace motiongen::render
