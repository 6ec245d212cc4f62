#include "motiongen/data/synthesize.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "motiongen/common.hpp"

namespace motiongen::data {

using lie::Vector3d;

void SyntheticActionSpec::validate(const lie::Skeleton& skeleton) const {
  if (static_cast<int>(bone_waves.size()) != skeleton.bone_count()) {
    throw ValidationError("spec '" + name + "' has " + std::to_string(bone_waves.size()) +
                          " bone channels, skeleton has " +
                          std::to_string(skeleton.bone_count()) + " bones");
  }
  if (!(duration_min > 0.0) || duration_max < duration_min) {
    throw ValidationError("spec '" + name + "' has an invalid duration range");
  }
  if (!(fps > 0.0)) throw ValidationError("spec '" + name + "' needs a positive fps");
  for (size_t b = 0; b < bone_waves.size(); ++b) {
    double bound_sq = 0.0;
    for (int d = 0; d < 3; ++d) {
      const ChannelWave& w = bone_waves[b][d];
      if (std::abs(w.amp) > 0.0 && !(w.freq > 0.0)) {
        throw ValidationError("spec '" + name + "' bone " + std::to_string(b) +
                              " oscillates with non-positive frequency");
      }
      const double reach = std::abs(w.base) + std::abs(w.amp) * (1.0 + jitter_amp);
      bound_sq += reach * reach;
    }
    if (std::sqrt(bound_sq) > M_PI) {
      throw ValidationError("spec '" + name + "' bone " + std::to_string(b) +
                            " can exceed an omega norm of pi");
    }
  }
  for (int d = 0; d < 3; ++d) {
    if (std::abs(root_waves[d].amp) > 0.0 && !(root_waves[d].freq > 0.0)) {
      throw ValidationError("spec '" + name + "' root axis oscillates with non-positive frequency");
    }
  }
}

std::vector<Vector3d> rest_pose_omegas(const lie::Skeleton& skeleton) {
  // Target world direction per bone, keyed by the child joint name.
  static const std::map<std::string, Vector3d> kDirections = {
      {"spine_lower", {1, 0, 0}},   {"spine_mid", {0, 1, 0}},
      {"chest", {0, 1, 0}},         {"head", {0, 1, 0}},
      {"left_shoulder", {0, 1, 0}}, {"left_elbow", {0, 0, 1}},
      {"left_wrist", {0, 0, 1}},    {"left_hand", {0, 0, 1}},
      {"right_shoulder", {0, 1, 0}}, {"right_elbow", {0, 0, -1}},
      {"right_wrist", {0, 0, -1}},  {"right_hand", {0, 0, -1}},
      {"left_hip", {1, 0, 0}},      {"left_knee", {0, -1, 0.25}},
      {"left_ankle", {0, -1, 0.05}}, {"left_foot", {1, 0, 0.1}},
      {"right_hip", {1, 0, 0}},     {"right_knee", {0, -1, -0.25}},
      {"right_ankle", {0, -1, -0.05}}, {"right_foot", {1, 0, -0.1}},
  };
  lie::JointPose targets;
  targets.joints.assign(skeleton.joint_count(), Vector3d::Zero());
  const auto& lengths = skeleton.bone_lengths();
  int b = 0;
  for (const lie::Bone& bone : skeleton.bones()) {
    auto it = kDirections.find(skeleton.joints()[bone.child]);
    Vector3d dir = it != kDirections.end() ? it->second : Vector3d(1, 0, 0);
    dir.normalize();
    targets.joints[bone.child] = targets.joints[bone.parent] + lengths[b] * dir;
    ++b;
  }
  return lie::inverse_kinematics(targets, skeleton).omega;
}

namespace {

int bone_index(const lie::Skeleton& skeleton, const std::string& parent,
               const std::string& child) {
  const int p = skeleton.joint_index(parent);
  const int c = skeleton.joint_index(child);
  for (size_t b = 0; b < skeleton.bones().size(); ++b) {
    if (skeleton.bones()[b].parent == p && skeleton.bones()[b].child == c) {
      return static_cast<int>(b);
    }
  }
  throw ValidationError("skeleton has no bone " + parent + " -> " + child);
}

SyntheticActionSpec base_spec(const std::string& name, const lie::Skeleton& skeleton,
                              const std::vector<Vector3d>& rest) {
  SyntheticActionSpec spec;
  spec.name = name;
  spec.bone_waves.resize(skeleton.bone_count());
  for (int b = 0; b < skeleton.bone_count(); ++b) {
    for (int d = 0; d < 3; ++d) spec.bone_waves[b][d].base = rest[b][d];
  }
  return spec;
}

void add_wave(SyntheticActionSpec& spec, int bone, int dof, double base, double amp,
              double freq, double phase) {
  ChannelWave& w = spec.bone_waves[bone][dof];
  w.base += base;
  w.amp = amp;
  w.freq = freq;
  w.phase = phase;
}

}  // namespace

std::vector<SyntheticActionSpec> default_action_specs(const lie::Skeleton& skeleton) {
  const std::vector<Vector3d> rest = rest_pose_omegas(skeleton);
  const int r_shoulder = bone_index(skeleton, "chest", "right_shoulder");
  const int r_upper = bone_index(skeleton, "right_shoulder", "right_elbow");
  const int l_shoulder = bone_index(skeleton, "chest", "left_shoulder");
  const int spine0 = bone_index(skeleton, "pelvis", "spine_lower");
  const int l_hip = bone_index(skeleton, "pelvis", "left_hip");
  const int r_hip = bone_index(skeleton, "pelvis", "right_hip");
  const int l_thigh = bone_index(skeleton, "left_hip", "left_knee");
  const int r_thigh = bone_index(skeleton, "right_hip", "right_knee");

  std::vector<SyntheticActionSpec> specs;

  // Forearm oscillation plus a raised upper arm.
  SyntheticActionSpec wave = base_spec("wave", skeleton, rest);
  add_wave(wave, r_upper, 2, 0.5, 0.8, 1.3, 0.0);
  add_wave(wave, r_shoulder, 1, 0.4, 0.3, 1.3, M_PI / 2);
  specs.push_back(wave);

  // Vertical root bounce with synchronized hip and knee bends.
  SyntheticActionSpec squat = base_spec("squat", skeleton, rest);
  squat.root_waves[1] = {0.0, 0.12, 0.7, -M_PI / 2};
  add_wave(squat, l_hip, 2, -0.2, 0.45, 0.7, M_PI / 2);
  add_wave(squat, r_hip, 2, -0.2, 0.45, 0.7, M_PI / 2);
  add_wave(squat, l_thigh, 2, 0.25, 0.5, 0.7, -M_PI / 2);
  add_wave(squat, r_thigh, 2, 0.25, 0.5, 0.7, -M_PI / 2);
  specs.push_back(squat);

  // Antiphase leg lifts, a light arm swing, and a fast small root bob.
  SyntheticActionSpec walk = base_spec("walk_in_place", skeleton, rest);
  add_wave(walk, l_hip, 2, 0.0, 0.5, 1.1, 0.0);
  add_wave(walk, r_hip, 2, 0.0, 0.5, 1.1, M_PI);
  add_wave(walk, l_thigh, 2, 0.0, 0.4, 1.1, -M_PI / 2);
  add_wave(walk, r_thigh, 2, 0.0, 0.4, 1.1, M_PI / 2);
  add_wave(walk, l_shoulder, 1, 0.0, 0.3, 1.1, M_PI);
  add_wave(walk, r_shoulder, 1, 0.0, 0.3, 1.1, 0.0);
  walk.root_waves[1] = {0.0, 0.025, 2.2, 0.0};
  specs.push_back(walk);

  // Slow full-arm sweep with a slight spine lean, static root.
  SyntheticActionSpec reach = base_spec("reach", skeleton, rest);
  add_wave(reach, l_shoulder, 1, 0.0, 1.1, 0.4, 0.0);
  add_wave(reach, spine0, 0, 0.0, 0.25, 0.4, M_PI / 2);
  specs.push_back(reach);

  for (const auto& s : specs) s.validate(skeleton);
  return specs;
}

LoadedDataset synthesize_dataset(const std::vector<SyntheticActionSpec>& specs,
                                 int n_per_action, const lie::Skeleton& skeleton,
                                 nn::RandomStream& rng) {
  if (specs.size() < 2) throw ValidationError("need at least two action specs");
  if (n_per_action < 1) throw ValidationError("need at least one motion per action");
  for (const auto& spec : specs) spec.validate(skeleton);

  LoadedDataset ds;
  ds.skeleton = std::make_shared<lie::Skeleton>(skeleton);
  ds.manifest.skeleton_path = "skeleton.txt";
  for (const auto& spec : specs) {
    if (ds.manifest.action_id(spec.name) >= 0) {
      throw ValidationError("duplicate action name '" + spec.name + "'");
    }
    ds.manifest.action_names.push_back(spec.name);
  }

  const int n_bones = skeleton.bone_count();
  for (size_t a = 0; a < specs.size(); ++a) {
    const SyntheticActionSpec& spec = specs[a];
    for (int sample = 0; sample < n_per_action; ++sample) {
      const double duration = rng.uniform(spec.duration_min, spec.duration_max);
      const int frames = std::max(2, static_cast<int>(std::lround(duration * spec.fps)) + 1);

      // One jittered copy of every channel; draws are unconditional so
      // the stream layout does not depend on spec sparsity.
      std::vector<std::array<ChannelWave, 3>> waves = spec.bone_waves;
      for (auto& bone : waves) {
        for (auto& w : bone) {
          const double ja = rng.uniform(-spec.jitter_amp, spec.jitter_amp);
          const double jf = rng.uniform(-spec.jitter_freq, spec.jitter_freq);
          const double jp = rng.uniform(-spec.jitter_phase, spec.jitter_phase);
          w.amp *= 1.0 + ja;
          w.freq *= 1.0 + jf;
          w.phase += jp;
        }
      }
      std::array<ChannelWave, 3> root = spec.root_waves;
      for (auto& w : root) {
        const double ja = rng.uniform(-spec.jitter_root, spec.jitter_root);
        const double jf = rng.uniform(-spec.jitter_freq, spec.jitter_freq);
        const double jp = rng.uniform(-spec.jitter_phase, spec.jitter_phase);
        w.amp *= 1.0 + ja;
        w.freq *= 1.0 + jf;
        w.phase += jp;
      }

      MotionRecord rec;
      rec.action_label = spec.name;
      rec.action_id = static_cast<int>(a);
      rec.skeleton_name = skeleton.name();
      rec.fps = spec.fps;
      rec.joint_count = skeleton.joint_count();
      rec.frames.resize(frames, 3 * skeleton.joint_count());
      Eigen::VectorXd omega(3 * n_bones);
      Eigen::VectorXd positions;
      for (int f = 0; f < frames; ++f) {
        const double t = static_cast<double>(f) / spec.fps;
        for (int b = 0; b < n_bones; ++b) {
          for (int d = 0; d < 3; ++d) {
            const ChannelWave& w = waves[b][d];
            omega[3 * b + d] = w.base + w.amp * std::sin(2.0 * M_PI * w.freq * t + w.phase);
          }
        }
        Vector3d root_pos;
        for (int d = 0; d < 3; ++d) {
          const ChannelWave& w = root[d];
          root_pos[d] = w.base + w.amp * std::sin(2.0 * M_PI * w.freq * t + w.phase);
        }
        lie::forward_kinematics_flat(omega, root_pos, skeleton, positions);
        rec.frames.row(f) = positions.transpose();
      }
      ds.records.push_back(std::move(rec));

      ManifestEntry entry;
      char idx[16];
      std::snprintf(idx, sizeof(idx), "%03d", sample);
      entry.path = "motions/" + spec.name + "_" + idx + ".txt";
      entry.action_id = static_cast<int>(a);
      ds.manifest.entries.push_back(std::move(entry));
    }
    // Deterministic 80/20 split within the class.
    std::vector<int> order(n_per_action);
    for (int i = 0; i < n_per_action; ++i) order[i] = i;
    rng.shuffle(order);
    const int train_count =
        std::max(1, static_cast<int>(std::floor(0.8 * static_cast<double>(n_per_action))));
    const size_t base = a * static_cast<size_t>(n_per_action);
    for (int i = train_count; i < n_per_action; ++i) {
      ds.manifest.entries[base + order[i]].is_test = true;
    }
  }
  return ds;
}

std::vector<SyntheticActionSpec> load_action_specs(const std::string& path,
                                                   const lie::Skeleton& skeleton) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<SyntheticActionSpec> specs;
  const std::vector<Vector3d> rest = rest_pose_omegas(skeleton);
  std::string line;
  int line_no = 0;
  bool have_magic = false;
  SyntheticActionSpec current;
  bool in_spec = false;
  bool add_rest = true;
  auto finish = [&]() {
    if (add_rest) {
      for (int b = 0; b < skeleton.bone_count(); ++b) {
        for (int d = 0; d < 3; ++d) current.bone_waves[b][d].base += rest[b][d];
      }
    }
    current.validate(skeleton);
    specs.push_back(current);
    in_spec = false;
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    const std::string at = path + ":" + std::to_string(line_no);
    if (!have_magic) {
      if (toks.size() != 2 || toks[0] != "actionspecs" || toks[1] != "1") {
        throw ValidationError(at + ": expected 'actionspecs 1' header");
      }
      have_magic = true;
      continue;
    }
    if (toks[0] == "spec" && toks.size() == 2) {
      if (in_spec) throw ValidationError(at + ": previous spec not closed with 'end'");
      current = SyntheticActionSpec{};
      current.name = toks[1];
      current.bone_waves.resize(skeleton.bone_count());
      in_spec = true;
      add_rest = true;
    } else if (!in_spec) {
      throw ValidationError(at + ": expected 'spec <name>'");
    } else if (toks[0] == "end") {
      finish();
    } else if (toks[0] == "duration" && toks.size() == 3) {
      current.duration_min = parse_double(toks[1], at);
      current.duration_max = parse_double(toks[2], at);
    } else if (toks[0] == "fps" && toks.size() == 2) {
      current.fps = parse_double(toks[1], at);
    } else if (toks[0] == "rest" && toks.size() == 2) {
      add_rest = parse_int(toks[1], at) != 0;
    } else if (toks[0] == "jitter" && toks.size() == 5) {
      current.jitter_amp = parse_double(toks[1], at);
      current.jitter_freq = parse_double(toks[2], at);
      current.jitter_phase = parse_double(toks[3], at);
      current.jitter_root = parse_double(toks[4], at);
    } else if (toks[0] == "bone" && toks.size() == 7) {
      const int b = static_cast<int>(parse_int(toks[1], at));
      const int d = static_cast<int>(parse_int(toks[2], at));
      if (b < 0 || b >= skeleton.bone_count() || d < 0 || d > 2) {
        throw ValidationError(at + ": bone/dof out of range");
      }
      ChannelWave& w = current.bone_waves[b][d];
      w.base += parse_double(toks[3], at);
      w.amp = parse_double(toks[4], at);
      w.freq = parse_double(toks[5], at);
      w.phase = parse_double(toks[6], at);
    } else if (toks[0] == "root" && toks.size() == 6) {
      const int d = static_cast<int>(parse_int(toks[1], at));
      if (d < 0 || d > 2) throw ValidationError(at + ": root axis out of range");
      current.root_waves[d] = {parse_double(toks[2], at), parse_double(toks[3], at),
                               parse_double(toks[4], at), parse_double(toks[5], at)};
    } else {
      throw ValidationError(at + ": unrecognized line '" + toks[0] + "'");
    }
  }
  if (in_spec) throw ValidationError(path + ": last spec not closed with 'end'");
  if (specs.empty()) throw ValidationError(path + ": no specs defined");
  return specs;
}

std::string action_specs_text(const std::vector<SyntheticActionSpec>& specs) {
  std::ostringstream out;
  out << "actionspecs 1\n";
  for (const auto& spec : specs) {
    out << "spec " << spec.name << "\n";
    out << "rest 0\n";  // bases below already include the posture
    out << "duration " << format_double(spec.duration_min) << " "
        << format_double(spec.duration_max) << "\n";
    out << "fps " << format_double(spec.fps) << "\n";
    out << "jitter " << format_double(spec.jitter_amp) << " "
        << format_double(spec.jitter_freq) << " " << format_double(spec.jitter_phase)
        << " " << format_double(spec.jitter_root) << "\n";
    for (size_t b = 0; b < spec.bone_waves.size(); ++b) {
      for (int d = 0; d < 3; ++d) {
        const ChannelWave& w = spec.bone_waves[b][d];
        if (w.base == 0.0 && w.amp == 0.0) continue;
        out << "bone " << b << " " << d << " " << format_double(w.base) << " "
            << format_double(w.amp) << " " << format_double(w.freq) << " "
            << format_double(w.phase) << "\n";
      }
    }
    for (int d = 0; d < 3; ++d) {
      const ChannelWave& w = spec.root_waves[d];
      if (w.base == 0.0 && w.amp == 0.0) continue;
      out << "root " << d << " " << format_double(w.base) << " " << format_double(w.amp)
          << " " << format_double(w.freq) << " " << format_double(w.phase) << "\n";
    }
    out << "end\n";
  }
  return out.str();
}

void save_action_specs(const std::string& path,
                       const std::vector<SyntheticActionSpec>& specs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << action_specs_text(specs);
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace motiongen::data
