#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "motionauth/data/corpus.hpp"

namespace motionauth {

// Sinusoid-plus-ramp angle profile: a throw has an oscillatory preparation
// phase and a monotone reach toward release.
struct MotionProfile {
  double base = 0;
  double amp = 0;
  double freq = 0;   // Hz
  double phase = 0;  // rad
  double ramp = 0;   // rad over the trial
};

// Per-user kinematic signature. Core lattice parameters are spread so that
// any two users differ in at least one of them by the separation margin.
struct UserSignature {
  MotionProfile shoulder, elbow, hip, knee;
  double upper_arm = 0, forearm = 0, thigh = 0, shank = 0, torso = 0;  // px
  double anchor_x = 0, anchor_y = 0;  // hip position, px
  double depth_amp = 0, depth_freq = 0, depth_phase = 0, depth_ramp = 0;
  double scale3d = 0;       // px -> m lift for the controller track
  double release_frac = 0;  // ramp onset as a fraction of the trial
  double noise_scale = 0;
};

inline constexpr double kSignatureSeparationMargin = 0.15;

struct SynthConfig {
  int n_users = 4;
  int sessions = 2;
  int trials = 10;
  int t_samples = 135;     // device-rate samples per trial
  int video_frames = 180;  // camera-rate frames per trial
  double image_width = 1920;
  double image_height = 1080;
  double noise_scale = 1.0;
  std::uint64_t seed = 7;
};

UserSignature make_user_signature(const SynthConfig& cfg, int user_index);

// Deterministic corpus of planar right-side throw motions. The in-memory
// trials go through the same joint-selection and downsampling path the file
// reader uses, so emitting the corpus and ingesting it reproduces these
// tensors bit for bit.
Corpus generate_corpus(const SynthConfig& cfg);

// Writes keypoint JSON, controller CSVs, and manifest.json under dir.
void emit_corpus_files(const SynthConfig& cfg,
                       const std::filesystem::path& dir);

// Enumeration oracles used to verify the production implementations.
double oracle_eer(const std::vector<double>& genuine,
                  const std::vector<double>& impostor,
                  double* threshold_out = nullptr);
std::vector<int> oracle_windows(int t_total, int w, int stride);

}  // namespace motionauth
