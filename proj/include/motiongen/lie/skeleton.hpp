#pragma once

#include <string>
#include <vector>

namespace motiongen::lie {

// One rigid segment of a kinematic chain. Bones are stored flattened in
// chain order; `parent` and `child` are joint indices.
struct Bone {
  int parent = -1;
  int child = -1;
  int chain = -1;
  int index_in_chain = -1;  // 0-based position within the chain
};

/// Joint topology as kinematic chains plus per-bone lengths (meters).
/// Each chain is an ordered list of joint indices; the first entry is the
/// chain's anchor (the root joint or an interior joint of an earlier
/// chain), the remaining entries are that chain's own joints. Every
/// non-root joint appears exactly once as a non-anchor entry.
class Skeleton {
 public:
  Skeleton() = default;
  Skeleton(std::string name, std::vector<std::string> joints,
           std::vector<std::vector<int>> chains, std::vector<double> bone_lengths,
           int root_index);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& joints() const { return joints_; }
  const std::vector<std::vector<int>>& chains() const { return chains_; }
  const std::vector<double>& bone_lengths() const { return bone_lengths_; }
  int root_index() const { return root_index_; }

  int joint_count() const { return static_cast<int>(joints_.size()); }
  int chain_count() const { return static_cast<int>(chains_.size()); }
  int bone_count() const { return static_cast<int>(bones_.size()); }

  // Bones flattened in chain order; bone b carries bone_lengths()[b].
  const std::vector<Bone>& bones() const { return bones_; }

  int joint_index(const std::string& name) const;  // -1 when absent

 private:
  void validate();

  std::string name_;
  std::vector<std::string> joints_;
  std::vector<std::vector<int>> chains_;
  std::vector<double> bone_lengths_;
  int root_index_ = 0;
  std::vector<Bone> bones_;
};

// Multiplies bone lengths elementwise; topology unchanged. Factors must
// all be positive; a single-element vector applies uniformly.
Skeleton scale_skeleton(const Skeleton& skeleton, const std::vector<double>& factors);

}  // namespace motiongen::lie
