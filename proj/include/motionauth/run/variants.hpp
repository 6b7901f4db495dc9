#pragma once

#include <string>
#include <vector>

namespace motionauth {

// One experiment lane: what feeds the predictor and what it must produce.
// The twelve lanes mirror the evaluation protocol: a 3D-to-3D forecasting
// baseline, two 2D-to-2D ablations, and nine 3D-from-2D joint-set variants.
struct ExperimentVariant {
  enum class InputKind { joints2d, controller3d };
  enum class TargetKind { controller3d, wrist2d };

  std::string name;
  InputKind input = InputKind::joints2d;
  TargetKind target = TargetKind::controller3d;
  std::string code;  // joint-set code for 2D inputs, empty for the baseline

  bool is_li_baseline() const { return input == InputKind::controller3d; }
  int n_in() const;            // joint count (0 for the 3D-input baseline)
  int input_features() const;  // per-timestep features fed to the predictor
  int output_dim() const;      // 3 for controller, 2 for wrist tracks
};

inline constexpr const char* kLiBaselineName = "Li2024-3Dfrom3D";

// All twelve variants in report column order.
const std::vector<ExperimentVariant>& all_variants();

// Accepts a full variant name or a bare joint code (shorthand for the
// 3Dfrom2D lane).
const ExperimentVariant& variant_by_name(const std::string& name);

struct GridCombo {
  int w = 0;
  int w_in = 0;
};

// The twenty published (w, w_in) combinations.
const std::vector<GridCombo>& full_grid();
std::vector<GridCombo> small_grid();

// "full", "small", or an explicit list like "40x30,90x60".
std::vector<GridCombo> parse_grid(const std::string& spec);

}  // namespace motionauth
