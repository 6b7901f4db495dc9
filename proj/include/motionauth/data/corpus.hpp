#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "motionauth/data/manifest.hpp"
#include "motionauth/data/trial.hpp"

namespace motionauth {

// All trials of a dataset in canonical order (user id, session, trial),
// plus the normalization statistics derived from its session-1 data.
struct Corpus {
  std::string layout = "body25";
  double image_width = 0;
  double image_height = 0;
  int t_samples = 135;
  std::vector<MotionTrial> trials;
  NormStats stats;
  bool normalized = false;
  std::uint64_t digest = 0;  // over the raw (pre-normalization) payload

  std::vector<std::string> user_ids() const;
  const MotionTrial* find(const std::string& user, int session,
                          int trial) const;
  std::vector<const MotionTrial*> user_session(const std::string& user,
                                               int session) const;
  bool has_session(const std::string& user, int session) const;
};

// Parses every trial named by the manifest: keypoints (all six right-side
// joints), carry-forward fill, downsample to t_samples, controller CSV.
Corpus load_corpus(const DatasetManifest& manifest);

// Computes session-1 statistics and applies them to every trial.
void normalize_corpus(Corpus& corpus);

std::uint64_t compute_corpus_digest(const Corpus& corpus);

// Trial-store container (f64 payload).
void save_trials(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_trials(const std::filesystem::path& path);

void sort_trials(Corpus& corpus);

}  // namespace motionauth
