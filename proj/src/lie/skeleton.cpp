#include "motiongen/lie/skeleton.hpp"

#include <set>

#include "motiongen/common.hpp"

namespace motiongen::lie {

Skeleton::Skeleton(std::string name, std::vector<std::string> joints,
                   std::vector<std::vector<int>> chains,
                   std::vector<double> bone_lengths, int root_index)
    : name_(std::move(name)),
      joints_(std::move(joints)),
      chains_(std::move(chains)),
      bone_lengths_(std::move(bone_lengths)),
      root_index_(root_index) {
  validate();
}

void Skeleton::validate() {
  const int j = joint_count();
  if (j < 2) throw ValidationError("skeleton needs at least two joints");
  if (chains_.empty()) throw ValidationError("skeleton needs at least one chain");
  if (root_index_ < 0 || root_index_ >= j) {
    throw ValidationError("skeleton root index out of range");
  }

  // Anchors must be placeable before their chain is walked: the root, or
  // a non-anchor member of an earlier chain.
  std::set<int> placed;
  placed.insert(root_index_);
  std::set<int> interior;
  int chain_id = 0;
  for (const auto& chain : chains_) {
    if (chain.size() < 2) {
      throw ValidationError("chain " + std::to_string(chain_id) +
                            " needs an anchor and at least one joint");
    }
    for (int idx : chain) {
      if (idx < 0 || idx >= j) {
        throw ValidationError("chain " + std::to_string(chain_id) +
                              " references unknown joint " + std::to_string(idx));
      }
    }
    if (!placed.count(chain[0])) {
      throw ValidationError("chain " + std::to_string(chain_id) + " anchor joint " +
                            std::to_string(chain[0]) +
                            " is not the root or a member of an earlier chain");
    }
    for (size_t i = 1; i < chain.size(); ++i) {
      const int idx = chain[i];
      if (idx == root_index_) {
        throw ValidationError("root joint may only appear as a chain anchor");
      }
      if (!interior.insert(idx).second) {
        throw ValidationError("joint " + std::to_string(idx) +
                              " appears in more than one chain");
      }
      placed.insert(idx);
      Bone bone;
      bone.parent = chain[i - 1];
      bone.child = idx;
      bone.chain = chain_id;
      bone.index_in_chain = static_cast<int>(i) - 1;
      bones_.push_back(bone);
    }
    ++chain_id;
  }
  if (static_cast<int>(interior.size()) != j - 1) {
    throw ValidationError("chains must cover every non-root joint exactly once");
  }

  if (static_cast<int>(bone_lengths_.size()) != bone_count()) {
    throw ValidationError("expected " + std::to_string(bone_count()) +
                          " bone lengths, got " + std::to_string(bone_lengths_.size()));
  }
  for (size_t b = 0; b < bone_lengths_.size(); ++b) {
    if (!(bone_lengths_[b] > 0.0)) {
      throw ValidationError("bone " + std::to_string(b) + " has non-positive length");
    }
  }
}

int Skeleton::joint_index(const std::string& name) const {
  for (size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Skeleton scale_skeleton(const Skeleton& skeleton, const std::vector<double>& factors) {
  std::vector<double> lengths = skeleton.bone_lengths();
  if (factors.size() == 1) {
    if (!(factors[0] > 0.0)) throw ValidationError("scale factor must be positive");
    for (double& l : lengths) l *= factors[0];
  } else {
    if (factors.size() != lengths.size()) {
      throw ValidationError("expected 1 or " + std::to_string(lengths.size()) +
                            " scale factors, got " + std::to_string(factors.size()));
    }
    for (size_t i = 0; i < lengths.size(); ++i) {
      if (!(factors[i] > 0.0)) {
        throw ValidationError("scale factor " + std::to_string(i) + " must be positive");
      }
      lengths[i] *= factors[i];
    }
  }
  return Skeleton(skeleton.name(), skeleton.joints(), skeleton.chains(), lengths,
                  skeleton.root_index());
}

}  // namespace motiongen::lie
