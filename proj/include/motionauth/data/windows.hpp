#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "motionauth/data/corpus.hpp"
#include "motionauth/mat.hpp"
#include "motionauth/run/variants.hpp"

namespace motionauth {

struct TrialKey {
  std::string user;
  int session = 0;
  int trial = 0;

  bool operator==(const TrialKey&) const = default;
};

// One training example. Input covers [start, start+w_in); the target covers
// [start, start+w) of the same trial. Impostor pairs carry the impostor's
// own target and start at the same index as their genuine counterpart.
struct WindowPair {
  MatF input;   // (w_in x input_features)
  MatF target;  // (w x output_dim)
  int label = 0;  // 1 genuine, 0 impostor
  int start = 0;
  TrialKey source;
};

struct WindowSet {
  std::vector<WindowPair> genuine;
  std::vector<WindowPair> impostor;
  int w = 0;
  int w_in = 0;
  int stride = 1;
  std::string variant;
  std::string user;  // the enrolled user the set was built for
  int session = 0;
  std::uint64_t seed = 0;
  std::uint64_t corpus_digest = 0;

  std::size_t total() const { return genuine.size() + impostor.size(); }
};

// All window start indices: {0, stride, 2*stride, ...} within [0, T - w].
std::vector<int> enumerate_windows(int t_total, int w, int stride);

// Genuine windows from every trial of (user, session); one impostor window
// per genuine window, drawn from a uniformly random other user, same
// session, uniformly random trial, at the same start index. Deterministic
// for a given seed.
WindowSet build_window_set(const Corpus& corpus,
                           const ExperimentVariant& variant,
                           const std::string& user, int session, int w,
                           int w_in, int stride, std::uint64_t seed);

struct SplitWindows {
  WindowSet train;  // session 1
  WindowSet test;   // session 2
};

SplitWindows session_split(const Corpus& corpus,
                           const ExperimentVariant& variant,
                           const std::string& user, int w, int w_in,
                           int stride, std::uint64_t seed);

// Container round-trip (f32 payload, JSON header).
void save_window_set(const WindowSet& set, const std::filesystem::path& path);
WindowSet load_window_set(const std::filesystem::path& path);

// Flat CSV escape hatch for manual inspection.
void dump_windows_csv(const WindowSet& set, const std::filesystem::path& path);

}  // namespace motionauth
