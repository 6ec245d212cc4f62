#pragma once

#include <array>
#include <string>
#include <vector>

#include "motiongen/data/manifest.hpp"
#include "motiongen/lie/kinematics.hpp"
#include "motiongen/nn/random.hpp"

namespace motiongen::data {

/// One sinusoidal channel: value(t) = base + amp * sin(2*pi*freq*t + phase).
struct ChannelWave {
  double base = 0.0;
  double amp = 0.0;
  double freq = 0.0;   // Hz
  double phase = 0.0;  // radians
};

/// Parametric recipe for one action class: a wave per bone DoF (on top of
/// a shared rest posture), a wave per root axis, a duration range, and
/// the per-sample jitter that creates within-class variation.
struct SyntheticActionSpec {
  std::string name;
  std::vector<std::array<ChannelWave, 3>> bone_waves;  // one entry per bone
  std::array<ChannelWave, 3> root_waves;
  double duration_min = 1.5;  // seconds
  double duration_max = 2.0;
  double fps = 12.0;
  double jitter_amp = 0.25;    // relative amplitude jitter
  double jitter_freq = 0.15;   // relative frequency jitter
  double jitter_phase = 0.6;   // absolute phase jitter, radians
  double jitter_root = 0.25;   // relative root amplitude jitter

  // Checks the worst-case per-bone omega norm stays within pi (jitter
  // included) and that oscillating channels have positive frequency.
  void validate(const lie::Skeleton& skeleton) const;
};

// Omegas for a neutral standing posture on the given skeleton, derived
// from per-bone target directions keyed by joint names (T-pose arms,
// legs slightly apart, spine up). Unknown joints rest along +x.
std::vector<lie::Vector3d> rest_pose_omegas(const lie::Skeleton& skeleton);

// The built-in four-action catalog (wave, squat, walk_in_place, reach),
// exercising arm chains, leg chains, the spine, and the root trajectory.
std::vector<SyntheticActionSpec> default_action_specs(const lie::Skeleton& skeleton);

// Draws `n_per_action` jittered samples per spec, renders them through
// forward kinematics, and assembles a manifest with a deterministic
// 80/20 per-class split. Fully reproducible from `rng`'s seed.
LoadedDataset synthesize_dataset(const std::vector<SyntheticActionSpec>& specs,
                                 int n_per_action, const lie::Skeleton& skeleton,
                                 nn::RandomStream& rng);

// Text round trip for action spec files.
std::vector<SyntheticActionSpec> load_action_specs(const std::string& path,
                                                   const lie::Skeleton& skeleton);
std::string action_specs_text(const std::vector<SyntheticActionSpec>& specs);
void save_action_specs(const std::string& path,
                       const std::vector<SyntheticActionSpec>& specs);

}  // namespace motiongen::data
