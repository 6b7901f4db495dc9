#include "motionauth/run/variants.hpp"

#include <sstream>

#include "motionauth/data/keypoints.hpp"
#include "motionauth/errors.hpp"

namespace motionauth {

int ExperimentVariant::n_in() const {
  if (input == InputKind::controller3d) return 0;
  return int(code_joints(code).size());
}

int ExperimentVariant::input_features() const {
  return input == InputKind::controller3d ? 3 : 2 * n_in();
}

int ExperimentVariant::output_dim() const {
  return target == TargetKind::controller3d ? 3 : 2;
}

const std::vector<ExperimentVariant>& all_variants() {
  using IK = ExperimentVariant::InputKind;
  using TK = ExperimentVariant::TargetKind;
  static const std::vector<ExperimentVariant> variants = [] {
    std::vector<ExperimentVariant> v;
    v.push_back({kLiBaselineName, IK::controller3d, TK::controller3d, ""});
    v.push_back({"2Dfrom2D_W", IK::joints2d, TK::wrist2d, "W"});
    v.push_back({"2Dfrom2D_WES", IK::joints2d, TK::wrist2d, "WES"});
    for (const auto& code : all_joint_codes())
      v.push_back({"3Dfrom2D_" + code, IK::joints2d, TK::controller3d, code});
    return v;
  }();
  return variants;
}

const ExperimentVariant& variant_by_name(const std::string& name) {
  for (const auto& v : all_variants()) {
    if (v.name == name) return v;
    if (!v.code.empty() && v.name == "3Dfrom2D_" + name) return v;
  }
  std::ostringstream os;
  os << "unknown variant '" << name << "' (expected one of:";
  for (const auto& v : all_variants()) os << ' ' << v.name;
  os << ", or a bare joint code)";
  throw ConfigError(os.str());
}

const std::vector<GridCombo>& full_grid() {
  static const std::vector<GridCombo> grid = {
      {40, 30},  {50, 30},  {50, 40},  {60, 40},  {60, 50},
      {70, 40},  {70, 50},  {70, 60},  {80, 50},  {80, 60},
      {80, 70},  {90, 50},  {90, 60},  {90, 70},  {100, 60},
      {100, 70}, {110, 60}, {110, 70}, {120, 70}, {130, 70}};
  return grid;
}

std::vector<GridCombo> small_grid() { return {{40, 30}, {50, 30}}; }

std::vector<GridCombo> parse_grid(const std::string& spec) {
  if (spec == "full") return full_grid();
  if (spec == "small") return small_grid();
  std::vector<GridCombo> grid;
  std::istringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos)
      throw ConfigError("grid entry '" + item + "' is not of the form WxWIN");
    GridCombo combo;
    try {
      combo.w = std::stoi(item.substr(0, x));
      combo.w_in = std::stoi(item.substr(x + 1));
    } catch (const std::exception&) {
      throw ConfigError("grid entry '" + item + "' is not of the form WxWIN");
    }
    if (combo.w_in >= combo.w)
      throw ConfigError("grid entry '" + item + "': w_in must be < w");
    grid.push_back(combo);
  }
  if (grid.empty()) throw ConfigError("grid '" + spec + "' is empty");
  return grid;
}

}  // namespace motionauth
