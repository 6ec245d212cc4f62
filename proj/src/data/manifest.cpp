#include "motiongen/data/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "motiongen/common.hpp"
#include "motiongen/data/skeleton_file.hpp"

namespace fs = std::filesystem;

namespace motiongen::data {

int DatasetManifest::action_id(const std::string& name) const {
  for (size_t i = 0; i < action_names.size(); ++i) {
    if (action_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

void save_manifest(const std::string& path, const DatasetManifest& manifest) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "manifest 1\n";
  out << "skeleton " << manifest.skeleton_path << "\n";
  for (const auto& [k, v] : manifest.extra) out << k << " " << v << "\n";
  out << "actions " << manifest.action_names.size() << "\n";
  for (size_t i = 0; i < manifest.action_names.size(); ++i) {
    out << "action " << i << " " << manifest.action_names[i] << "\n";
  }
  out << "motions " << manifest.entries.size() << "\n";
  for (const auto& e : manifest.entries) {
    if (e.action_id < 0 || e.action_id >= static_cast<int>(manifest.action_names.size())) {
      throw ValidationError("manifest entry '" + e.path + "' has an unknown action id");
    }
    out << "motion " << e.path << " " << (e.is_test ? "test" : "train") << " "
        << manifest.action_names[e.action_id] << "\n";
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  DatasetManifest m;
  std::string line;
  int line_no = 0;
  bool have_magic = false;
  int pending_actions = -1;
  int pending_motions = -1;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    const std::string at = path + ":" + std::to_string(line_no);
    if (!have_magic) {
      if (toks.size() != 2 || toks[0] != "manifest" || toks[1] != "1") {
        throw ValidationError(at + ": expected 'manifest 1' header");
      }
      have_magic = true;
      continue;
    }
    if (toks[0] == "skeleton" && toks.size() == 2) {
      m.skeleton_path = toks[1];
    } else if (toks[0] == "actions" && toks.size() == 2) {
      pending_actions = static_cast<int>(parse_int(toks[1], at));
      m.action_names.assign(pending_actions, "");
    } else if (toks[0] == "action" && toks.size() == 3) {
      const int id = static_cast<int>(parse_int(toks[1], at));
      if (id < 0 || id >= pending_actions) throw ValidationError(at + ": action id out of range");
      m.action_names[id] = toks[2];
    } else if (toks[0] == "motions" && toks.size() == 2) {
      pending_motions = static_cast<int>(parse_int(toks[1], at));
    } else if (toks[0] == "motion" && toks.size() == 4) {
      ManifestEntry e;
      e.path = toks[1];
      if (toks[2] == "train") {
        e.is_test = false;
      } else if (toks[2] == "test") {
        e.is_test = true;
      } else {
        throw ValidationError(at + ": split must be 'train' or 'test'");
      }
      e.action_id = m.action_id(toks[3]);
      if (e.action_id < 0) throw ValidationError(at + ": unknown action '" + toks[3] + "'");
      m.entries.push_back(std::move(e));
    } else if (toks.size() >= 2) {
      std::string rest = toks[1];
      for (size_t i = 2; i < toks.size(); ++i) rest += " " + toks[i];
      m.extra.emplace_back(toks[0], rest);
    } else {
      throw ValidationError(at + ": unrecognized line");
    }
  }
  if (m.skeleton_path.empty()) throw ValidationError(path + ": missing skeleton reference");
  for (const auto& name : m.action_names) {
    if (name.empty()) throw ValidationError(path + ": action vocabulary has gaps");
  }
  if (pending_motions >= 0 && pending_motions != static_cast<int>(m.entries.size())) {
    throw ValidationError(path + ": motion count does not match entries");
  }
  return m;
}

LoadedDataset load_dataset(const std::string& manifest_path) {
  LoadedDataset ds;
  ds.manifest = load_manifest(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  ds.skeleton = std::make_shared<lie::Skeleton>(
      load_skeleton((base / ds.manifest.skeleton_path).string()));
  ds.records.reserve(ds.manifest.entries.size());
  for (const auto& e : ds.manifest.entries) {
    MotionRecord rec = load_motion((base / e.path).string());
    const int id = ds.manifest.action_id(rec.action_label);
    if (id != e.action_id) {
      throw ValidationError("motion '" + e.path + "' label '" + rec.action_label +
                            "' disagrees with the manifest");
    }
    if (rec.joint_count != ds.skeleton->joint_count()) {
      throw ValidationError("motion '" + e.path + "' has " +
                            std::to_string(rec.joint_count) + " joints, skeleton has " +
                            std::to_string(ds.skeleton->joint_count()));
    }
    rec.action_id = id;
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

std::string save_dataset(const std::string& out_dir, const LoadedDataset& dataset) {
  if (dataset.records.size() != dataset.manifest.entries.size()) {
    throw ValidationError("dataset records do not align with manifest entries");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory '" + out_dir + "'");
  const fs::path base(out_dir);
  save_skeleton((base / dataset.manifest.skeleton_path).string(), *dataset.skeleton);
  for (size_t i = 0; i < dataset.records.size(); ++i) {
    const fs::path target = base / dataset.manifest.entries[i].path;
    fs::create_directories(target.parent_path(), ec);
    save_motion(target.string(), dataset.records[i]);
  }
  const std::string manifest_path = (base / "manifest.txt").string();
  save_manifest(manifest_path, dataset.manifest);
  return manifest_path;
}

}  // namespace motiongen::data
