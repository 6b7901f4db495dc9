#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "motionauth/mat.hpp"

namespace motionauth {

// Canonical right-side joint order used everywhere downstream:
// wrist, elbow, shoulder, hip, knee, ankle.
const std::vector<std::string>& canonical_joint_names();

// Joint-set codes name subsets of the canonical six: W, WES, WESH, WESK,
// WESA, WESHK, WESHA, WESKA, WESHKA.
const std::vector<std::string>& all_joint_codes();
std::vector<int> code_joints(const std::string& code);  // canonical indices
std::vector<std::string> code_joint_names(const std::string& code);

// Maps each canonical joint to its slot in a concrete pose-estimator output.
struct SkeletonLayout {
  std::string name;
  int joint_count = 0;
  std::array<int, 6> canonical_index{};  // W, E, S, H, K, A
};

// Built-in layouts: "body25" and "coco18".
const SkeletonLayout& skeleton_layout(const std::string& name);

struct KeypointJoint {
  double x = 0;
  double y = 0;
  double confidence = 0;
};

struct KeypointFrame {
  int frame_index = 0;
  std::vector<KeypointJoint> joints;  // one per layout slot
};

// Reads a keypoint file: either one JSON document holding an array of frames
// (top-level array or {"frames": [...]}), or a directory of per-frame JSON
// documents processed in sorted filename order. Missing detections (absent
// person, or a joint with zero confidence) carry the previous frame's
// coordinates with confidence 0; a missing first frame yields zeros.
std::vector<KeypointFrame> parse_keypoint_file(
    const std::filesystem::path& path, const SkeletonLayout& layout);

// Extracts the code's joints in canonical order as an (F x 2*n_in) matrix
// with columns [x0, y0, x1, y1, ...].
MatD select_joints(const std::vector<KeypointFrame>& frames,
                   const SkeletonLayout& layout, const std::string& code);

// Column-pair subset of an already-selected joint tensor. `from` must list
// the joints currently in the tensor, in canonical order.
MatD subset_joint_columns(const MatD& joints2d,
                          const std::vector<std::string>& from,
                          const std::string& code);

}  // namespace motionauth
