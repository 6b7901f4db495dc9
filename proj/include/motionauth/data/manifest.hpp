#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace motionauth {

struct TrialFiles {
  int trial = 0;
  std::string keypoints;   // path relative to the manifest
  std::string controller;  // path relative to the manifest
};

struct SessionEntry {
  int session = 0;
  std::vector<TrialFiles> trials;
};

struct UserEntry {
  std::string id;
  std::vector<SessionEntry> sessions;
};

// JSON document describing a corpus on disk: skeleton layout, image extent,
// device-rate sample count, and per-user trial file paths.
struct DatasetManifest {
  std::string layout = "body25";
  double image_width = 1920;
  double image_height = 1080;
  int t_samples = 135;
  std::vector<UserEntry> users;
  std::filesystem::path base_dir;  // directory the manifest was read from
};

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& m,
                    const std::filesystem::path& path);

}  // namespace motionauth
