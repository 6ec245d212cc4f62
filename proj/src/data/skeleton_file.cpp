#include "motiongen/data/skeleton_file.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "motiongen/common.hpp"

namespace motiongen::data {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path + "' failed");
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ValidationError(origin + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

std::string skeleton_to_text(const lie::Skeleton& s) {
  std::ostringstream os;
  os << "skeleton 1\n";
  os << "name " << s.name() << "\n";
  os << "joints " << s.joint_count() << "\n";
  for (int i = 0; i < s.joint_count(); ++i) {
    os << "joint " << i << " " << s.joints()[i] << "\n";
  }
  os << "root " << s.root_index() << "\n";
  os << "chains " << s.chain_count() << "\n";
  for (const auto& chain : s.chains()) {
    os << "chain";
    for (int idx : chain) os << " " << idx;
    os << "\n";
  }
  os << "bones " << s.bone_count() << "\n";
  for (int b = 0; b < s.bone_count(); ++b) {
    const lie::Bone& bone = s.bones()[b];
    os << "bone " << bone.parent << " " << bone.child << " "
       << format_double(s.bone_lengths()[b]) << "\n";
  }
  return os.str();
}

lie::Skeleton skeleton_from_text(const std::string& text, const std::string& origin) {
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  auto next_tokens = [&]() -> std::vector<std::string> {
    while (std::getline(is, line)) {
      ++line_no;
      auto toks = split_ws(line);
      if (toks.empty() || toks[0][0] == '#') continue;
      return toks;
    }
    fail(origin, line_no, "unexpected end of file");
  };

  auto header = next_tokens();
  if (header.size() != 2 || header[0] != "skeleton" || header[1] != "1") {
    fail(origin, line_no, "expected 'skeleton 1' header");
  }
  auto name_toks = next_tokens();
  if (name_toks.size() != 2 || name_toks[0] != "name") fail(origin, line_no, "expected 'name <id>'");
  const std::string name = name_toks[1];

  auto joints_toks = next_tokens();
  if (joints_toks.size() != 2 || joints_toks[0] != "joints") {
    fail(origin, line_no, "expected 'joints <count>'");
  }
  const int joint_count = static_cast<int>(parse_int(joints_toks[1], origin));
  std::vector<std::string> joints(joint_count);
  std::vector<bool> seen(joint_count, false);
  for (int i = 0; i < joint_count; ++i) {
    auto toks = next_tokens();
    if (toks.size() != 3 || toks[0] != "joint") fail(origin, line_no, "expected 'joint <index> <name>'");
    const int idx = static_cast<int>(parse_int(toks[1], origin));
    if (idx < 0 || idx >= joint_count) fail(origin, line_no, "joint index out of range");
    if (seen[idx]) fail(origin, line_no, "duplicate joint index");
    seen[idx] = true;
    joints[idx] = toks[2];
  }

  auto root_toks = next_tokens();
  if (root_toks.size() != 2 || root_toks[0] != "root") fail(origin, line_no, "expected 'root <index>'");
  const int root = static_cast<int>(parse_int(root_toks[1], origin));

  auto chains_toks = next_tokens();
  if (chains_toks.size() != 2 || chains_toks[0] != "chains") {
    fail(origin, line_no, "expected 'chains <count>'");
  }
  const int chain_count = static_cast<int>(parse_int(chains_toks[1], origin));
  std::vector<std::vector<int>> chains;
  for (int c = 0; c < chain_count; ++c) {
    auto toks = next_tokens();
    if (toks.size() < 3 || toks[0] != "chain") {
      fail(origin, line_no, "expected 'chain <idx> <idx> ...'");
    }
    std::vector<int> chain;
    for (size_t i = 1; i < toks.size(); ++i) {
      const int idx = static_cast<int>(parse_int(toks[i], origin));
      if (idx < 0 || idx >= joint_count) {
        fail(origin, line_no, "chain references unknown joint " + toks[i]);
      }
      chain.push_back(idx);
    }
    chains.push_back(std::move(chain));
  }

  auto bones_toks = next_tokens();
  if (bones_toks.size() != 2 || bones_toks[0] != "bones") {
    fail(origin, line_no, "expected 'bones <count>'");
  }
  const int bone_count = static_cast<int>(parse_int(bones_toks[1], origin));
  std::map<std::pair<int, int>, double> lengths_by_pair;
  for (int b = 0; b < bone_count; ++b) {
    auto toks = next_tokens();
    if (toks.size() != 4 || toks[0] != "bone") {
      fail(origin, line_no, "expected 'bone <parent> <child> <length>'");
    }
    const int parent = static_cast<int>(parse_int(toks[1], origin));
    const int child = static_cast<int>(parse_int(toks[2], origin));
    const double length = parse_double(toks[3], origin);
    if (!lengths_by_pair.emplace(std::make_pair(parent, child), length).second) {
      fail(origin, line_no, "duplicate bone (" + toks[1] + ", " + toks[2] + ")");
    }
  }

  // Order lengths by the chains' own bone order.
  std::vector<double> lengths;
  for (const auto& chain : chains) {
    for (size_t i = 1; i < chain.size(); ++i) {
      auto it = lengths_by_pair.find({chain[i - 1], chain[i]});
      if (it == lengths_by_pair.end()) {
        throw ValidationError(origin + ": no bone length for joint pair (" +
                              std::to_string(chain[i - 1]) + ", " +
                              std::to_string(chain[i]) + ")");
      }
      lengths.push_back(it->second);
    }
  }
  if (static_cast<int>(lengths.size()) != bone_count) {
    throw ValidationError(origin + ": bone list does not match chain structure");
  }

  try {
    return lie::Skeleton(name, joints, chains, lengths, root);
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

lie::Skeleton load_skeleton(const std::string& path) {
  return skeleton_from_text(read_file(path), path);
}

void save_skeleton(const std::string& path, const lie::Skeleton& skeleton) {
  write_file(path, skeleton_to_text(skeleton));
}

lie::Skeleton default_skeleton() {
  const std::vector<std::string> joints = {
      "pelvis",        "spine_lower",  "spine_mid",    "chest",        "head",
      "left_shoulder", "left_elbow",   "left_wrist",   "left_hand",
      "right_shoulder", "right_elbow", "right_wrist",  "right_hand",
      "left_hip",      "left_knee",    "left_ankle",   "left_foot",
      "right_hip",     "right_knee",   "right_ankle",  "right_foot"};
  const std::vector<std::vector<int>> chains = {
      {0, 1, 2, 3, 4},      // spine
      {3, 5, 6, 7, 8},      // left arm
      {3, 9, 10, 11, 12},   // right arm
      {0, 13, 14, 15, 16},  // left leg
      {0, 17, 18, 19, 20},  // right leg
  };
  const std::vector<double> lengths = {
      0.13, 0.14, 0.16, 0.24,  // spine
      0.17, 0.28, 0.25, 0.16,  // left arm
      0.17, 0.28, 0.25, 0.16,  // right arm
      0.11, 0.42, 0.40, 0.15,  // left leg
      0.11, 0.42, 0.40, 0.15,  // right leg
  };
  return lie::Skeleton("default", joints, chains, lengths, 0);
}

}  // namespace motiongen::data
