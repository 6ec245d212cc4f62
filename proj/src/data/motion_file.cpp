#include "motiongen/data/motion_file.hpp"

#include <fstream>
#include <sstream>

#include "motiongen/common.hpp"

namespace motiongen::data {

namespace {

struct Header {
  std::string kind;
  std::string skeleton;
  std::string action;
  double fps = 0.0;
  int width_units = 0;  // joints or bones
  int frames = 0;
  std::vector<std::pair<std::string, std::string>> extra;
};

void write_header(std::ostream& os, const std::string& kind, const std::string& skeleton,
                  const std::string& action, double fps, const char* width_key,
                  int width_units, int frames,
                  const std::vector<std::pair<std::string, std::string>>& extra) {
  os << "motion 1\n";
  os << "kind " << kind << "\n";
  os << "skeleton " << skeleton << "\n";
  os << "action " << action << "\n";
  os << "fps " << format_double(fps) << "\n";
  os << width_key << " " << width_units << "\n";
  os << "frames " << frames << "\n";
  for (const auto& [k, v] : extra) os << k << " " << v << "\n";
  os << "data\n";
}

void write_rows(std::ostream& os, const Matrix& frames) {
  for (int r = 0; r < frames.rows(); ++r) {
    for (int c = 0; c < frames.cols(); ++c) {
      if (c) os << ' ';
      os << format_double(frames(r, c));
    }
    os << '\n';
  }
}

Header parse_header(std::istream& is, const std::string& path, const char* width_key,
                    int& line_no) {
  Header h;
  std::string line;
  bool have_magic = false;
  while (std::getline(is, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (!have_magic) {
      if (toks.size() != 2 || toks[0] != "motion" || toks[1] != "1") {
        throw ValidationError(path + ":" + std::to_string(line_no) +
                              ": expected 'motion 1' header");
      }
      have_magic = true;
      continue;
    }
    if (toks[0] == "data") {
      if (h.kind.empty() || h.fps <= 0.0 || h.width_units <= 0 || h.frames < 1) {
        throw ValidationError(path + ": incomplete header before 'data'");
      }
      return h;
    }
    if (toks.size() < 2) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": bad header line");
    }
    const std::string& key = toks[0];
    if (key == "kind") {
      h.kind = toks[1];
    } else if (key == "skeleton") {
      h.skeleton = toks[1];
    } else if (key == "action") {
      h.action = toks[1];
    } else if (key == "fps") {
      h.fps = parse_double(toks[1], path + ":" + std::to_string(line_no));
    } else if (key == width_key) {
      h.width_units = static_cast<int>(parse_int(toks[1], path));
    } else if (key == "frames") {
      h.frames = static_cast<int>(parse_int(toks[1], path));
    } else {
      std::string rest = toks[1];
      for (size_t i = 2; i < toks.size(); ++i) rest += " " + toks[i];
      h.extra.emplace_back(key, rest);
    }
  }
  throw ValidationError(path + ": missing 'data' section");
}

Matrix parse_rows(std::istream& is, const std::string& path, int frames, int cols,
                  int& line_no) {
  Matrix m(frames, cols);
  std::string line;
  int row = 0;
  while (row < frames && std::getline(is, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (static_cast<int>(toks.size()) != cols) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(cols) + " values, got " +
                            std::to_string(toks.size()));
    }
    for (int c = 0; c < cols; ++c) {
      m(row, c) = parse_double(toks[c], path + ":" + std::to_string(line_no));
    }
    ++row;
  }
  if (row != frames) {
    throw ValidationError(path + ": expected " + std::to_string(frames) +
                          " frames, found " + std::to_string(row));
  }
  if (!m.allFinite()) {
    throw ValidationError(path + ": non-finite values in frame data");
  }
  return m;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

void save_motion(const std::string& path, const MotionRecord& record) {
  if (record.frames.cols() != 3 * record.joint_count || record.frame_count() < 1) {
    throw ValidationError("motion record shape does not match its joint count");
  }
  auto out = open_out(path);
  write_header(out, "joints", record.skeleton_name, record.action_label, record.fps,
               "joints", record.joint_count, record.frame_count(), record.extra);
  write_rows(out, record.frames);
  if (!out) throw IoError("write to '" + path + "' failed");
}

MotionRecord load_motion(const std::string& path) {
  auto in = open_in(path);
  int line_no = 0;
  Header h = parse_header(in, path, "joints", line_no);
  if (h.kind != "joints") {
    throw ValidationError(path + ": expected kind 'joints', got '" + h.kind + "'");
  }
  MotionRecord record;
  record.action_label = h.action;
  record.skeleton_name = h.skeleton;
  record.fps = h.fps;
  record.joint_count = h.width_units;
  record.extra = h.extra;
  record.frames = parse_rows(in, path, h.frames, 3 * h.width_units, line_no);
  return record;
}

void save_lie_motion(const std::string& path, const LieMotionRecord& record) {
  if (record.frames.cols() != 3 + 3 * record.bone_count || record.frame_count() < 1) {
    throw ValidationError("lie motion record shape does not match its bone count");
  }
  auto out = open_out(path);
  write_header(out, "lie", record.skeleton_name, record.action_label, record.fps,
               "bones", record.bone_count, record.frame_count(), record.extra);
  write_rows(out, record.frames);
  if (!out) throw IoError("write to '" + path + "' failed");
}

LieMotionRecord load_lie_motion(const std::string& path) {
  auto in = open_in(path);
  int line_no = 0;
  Header h = parse_header(in, path, "bones", line_no);
  if (h.kind != "lie") {
    throw ValidationError(path + ": expected kind 'lie', got '" + h.kind + "'");
  }
  LieMotionRecord record;
  record.action_label = h.action;
  record.skeleton_name = h.skeleton;
  record.fps = h.fps;
  record.bone_count = h.width_units;
  record.extra = h.extra;
  record.frames = parse_rows(in, path, h.frames, 3 + 3 * h.width_units, line_no);
  return record;
}

}  // namespace motiongen::data
