#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "motionauth/mat.hpp"

namespace motionauth {

// One 3-second capture: synchronized 2D joint tracks and the 3D right-hand
// controller track, both at device rate (T samples).
struct MotionTrial {
  std::string user_id;
  int session = 0;  // 1 or 2
  int trial = 0;    // 1..10
  MatD joints2d;    // (T x 2*n_joints), columns [x0, y0, x1, y1, ...]
  MatD controller3d;  // (T x 3)
  std::vector<std::string> joint_names;  // canonical-order subset
};

void validate_trial(const MotionTrial& t, int expected_t);

// Endpoint-preserving uniform index map: sample i comes from source index
// round(i * (F-1) / (T-1)). No upsampling.
MatD downsample_uniform(const MatD& frames, Eigen::Index t_dst);
std::vector<Eigen::Index> downsample_indices(Eigen::Index f_src,
                                             Eigen::Index t_dst);

// 2D pixels map to [0,1] by image extent; 3D axes are z-scored with
// statistics taken from training (session 1) data. A zero-variance axis gets
// std 1 and is flagged.
struct NormStats {
  double image_width = 0;
  double image_height = 0;
  std::array<double, 3> mean3{0, 0, 0};
  std::array<double, 3> std3{1, 1, 1};
  std::array<bool, 3> std_floored{false, false, false};
};

NormStats compute_norm_stats(const std::vector<MotionTrial>& trials,
                             double image_width, double image_height);

MotionTrial normalize_trial(MotionTrial trial, const NormStats& stats);
MotionTrial denormalize_trial(MotionTrial trial, const NormStats& stats);

// Controller track CSV: header "t,x,y,z", one row per device sample.
MatD read_controller_csv(const std::filesystem::path& path);
void write_controller_csv(const std::filesystem::path& path,
                          const MatD& track);

}  // namespace motionauth
