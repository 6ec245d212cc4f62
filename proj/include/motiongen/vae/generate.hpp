#pragma once

#include "motiongen/data/motion_file.hpp"
#include "motiongen/vae/model.hpp"

namespace motiongen::vae {

struct GeneratedMotion {
  data::MotionRecord joints;     // world coordinates, sequence anchored at the origin
  data::LieMotionRecord lie;     // canonicalized omegas plus the root trajectory
  nn::Matrix trajectory;         // T x 3 world root positions
};

// Test-phase sampling: at each step the latent is drawn from the learned
// prior conditioned on the previously generated pose (zero at t = 1),
// decoded, and fed back. Deterministic given the RNG state; every frame
// satisfies the skeleton's bone lengths by construction.
GeneratedMotion generate(const VaeModel& model, int action_id,
                         const std::string& action_label, int length,
                         const lie::Skeleton& skeleton, nn::RandomStream& rng,
                         double fps = 12.0);

// Network-space variant used by evaluation: returns the T x D matrix of
// generated network pose vectors without exporting world coordinates.
nn::Matrix generate_net_frames(const VaeModel& model, int action_id, int length,
                               std::shared_ptr<const lie::Skeleton> skeleton,
                               nn::RandomStream& rng);

}  // namespace motiongen::vae
