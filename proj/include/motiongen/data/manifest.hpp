#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "motiongen/data/motion_file.hpp"
#include "motiongen/lie/skeleton.hpp"

namespace motiongen::data {

struct ManifestEntry {
  std::string path;  // relative to the manifest file
  int action_id = -1;
  bool is_test = false;
};

/// Index of a dataset on disk: skeleton reference, action vocabulary,
/// motion entries with their train/test split, and optional stamped
/// metadata. Normalization statistics live on the prepared dataset, not
/// in the file.
struct DatasetManifest {
  std::string skeleton_path;
  std::vector<std::string> action_names;
  std::vector<ManifestEntry> entries;
  std::vector<std::pair<std::string, std::string>> extra;

  int action_id(const std::string& name) const;  // -1 when unknown
};

void save_manifest(const std::string& path, const DatasetManifest& manifest);
DatasetManifest load_manifest(const std::string& path);

/// A manifest together with its skeleton and all referenced motions,
/// records aligned with manifest.entries.
struct LoadedDataset {
  std::shared_ptr<const lie::Skeleton> skeleton;
  DatasetManifest manifest;
  std::vector<MotionRecord> records;
};

// Loads the manifest, its skeleton, and every motion file, resolving
// paths relative to the manifest location. Labels are validated against
// the vocabulary.
LoadedDataset load_dataset(const std::string& manifest_path);

// Writes a dataset under `out_dir`: skeleton file, one motion file per
// record at its manifest path, and the manifest itself. Returns the
// manifest path.
std::string save_dataset(const std::string& out_dir, const LoadedDataset& dataset);

}  // namespace motiongen::data
