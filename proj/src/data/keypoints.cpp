#include "motionauth/data/keypoints.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "motionauth/errors.hpp"

namespace motionauth {

using nlohmann::json;

const std::vector<std::string>& canonical_joint_names() {
  static const std::vector<std::string> names = {"wrist", "elbow", "shoulder",
                                                 "hip",   "knee",  "ankle"};
  return names;
}

const std::vector<std::string>& all_joint_codes() {
  static const std::vector<std::string> codes = {
      "W",     "WES",   "WESH",  "WESK", "WESA",
      "WESHK", "WESHA", "WESKA", "WESHKA"};
  return codes;
}

std::vector<int> code_joints(const std::string& code) {
  const auto& codes = all_joint_codes();
  if (std::find(codes.begin(), codes.end(), code) == codes.end())
    throw ConfigError("unknown joint code '" + code + "'");
  static const std::map<char, int> letter = {{'W', 0}, {'E', 1}, {'S', 2},
                                             {'H', 3}, {'K', 4}, {'A', 5}};
  std::vector<int> idx;
  for (char ch : code) idx.push_back(letter.at(ch));
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<std::string> code_joint_names(const std::string& code) {
  std::vector<std::string> names;
  for (int i : code_joints(code)) names.push_back(canonical_joint_names()[i]);
  return names;
}

const SkeletonLayout& skeleton_layout(const std::string& name) {
  // Index tables for the supported pose-estimator output orderings.
  static const SkeletonLayout body25{"body25", 25, {4, 3, 2, 9, 10, 11}};
  static const SkeletonLayout coco18{"coco18", 18, {4, 3, 2, 8, 9, 10}};
  if (name == "body25") return body25;
  if (name == "coco18") return coco18;
  throw ConfigError("unknown skeleton layout '" + name +
                    "' (expected body25 or coco18)");
}

namespace {

// Extracts the joint triples of one frame document, or nothing if no person
// was detected.
std::vector<KeypointJoint> frame_joints(const json& frame,
                                        const SkeletonLayout& layout,
                                        const std::string& where) {
  if (!frame.is_object())
    throw ParseError(where + ": frame record must be a JSON object");
  if (!frame.contains("people") || !frame["people"].is_array() ||
      frame["people"].empty())
    return {};
  const json& person = frame["people"][0];  // single-person capture
  if (!person.contains("pose_keypoints_2d") ||
      !person["pose_keypoints_2d"].is_array())
    throw ParseError(where + ": person record lacks pose_keypoints_2d");
  const json& kp = person["pose_keypoints_2d"];
  if (int(kp.size()) != 3 * layout.joint_count)
    throw ParseError(where + ": expected " +
                     std::to_string(3 * layout.joint_count) +
                     " keypoint values for layout " + layout.name + ", got " +
                     std::to_string(kp.size()));
  std::vector<KeypointJoint> joints(std::size_t(layout.joint_count));
  for (int j = 0; j < layout.joint_count; ++j) {
    KeypointJoint& jt = joints[std::size_t(j)];
    jt.x = kp[std::size_t(3 * j)].get<double>();
    jt.y = kp[std::size_t(3 * j + 1)].get<double>();
    jt.confidence = kp[std::size_t(3 * j + 2)].get<double>();
    if (!std::isfinite(jt.x) || !std::isfinite(jt.y))
      throw ParseError(where + ": non-finite coordinate at joint " +
                       std::to_string(j));
    if (jt.confidence < 0.0 || jt.confidence > 1.0)
      throw ParseError(where + ": confidence outside [0,1] at joint " +
                       std::to_string(j));
  }
  return joints;
}

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open keypoint file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("keypoint file " + path.string() + ": " + e.what());
  }
}

}  // namespace

std::vector<KeypointFrame> parse_keypoint_file(
    const std::filesystem::path& path, const SkeletonLayout& layout) {
  std::vector<json> frame_docs;
  std::vector<std::string> labels;

  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
      throw ParseError("keypoint directory " + path.string() +
                       " holds no .json files");
    for (const auto& f : files) {
      frame_docs.push_back(parse_json_file(f));
      labels.push_back(f.string());
    }
  } else {
    json doc = parse_json_file(path);
    const json* frames = nullptr;
    if (doc.is_array()) {
      frames = &doc;
    } else if (doc.is_object() && doc.contains("frames") &&
               doc["frames"].is_array()) {
      frames = &doc["frames"];
    } else {
      throw ParseError("keypoint file " + path.string() +
                       ": expected an array of frames or a {\"frames\": "
                       "[...]} document");
    }
    for (std::size_t i = 0; i < frames->size(); ++i) {
      frame_docs.push_back((*frames)[i]);
      labels.push_back(path.string() + ": frame " + std::to_string(i));
    }
  }

  std::vector<KeypointFrame> out;
  out.reserve(frame_docs.size());
  std::vector<KeypointJoint> prev(std::size_t(layout.joint_count));
  for (std::size_t i = 0; i < frame_docs.size(); ++i) {
    std::vector<KeypointJoint> joints =
        frame_joints(frame_docs[i], layout, labels[i]);
    KeypointFrame frame;
    frame.frame_index = int(i);
    if (joints.empty()) {
      frame.joints = prev;  // whole frame missing: carry forward
      for (auto& j : frame.joints) j.confidence = 0.0;
    } else {
      frame.joints = std::move(joints);
      for (int j = 0; j < layout.joint_count; ++j) {
        auto& jt = frame.joints[std::size_t(j)];
        if (jt.confidence <= 0.0) {
          jt.x = prev[std::size_t(j)].x;
          jt.y = prev[std::size_t(j)].y;
          jt.confidence = 0.0;
        }
      }
    }
    for (int j = 0; j < layout.joint_count; ++j) {
      prev[std::size_t(j)].x = frame.joints[std::size_t(j)].x;
      prev[std::size_t(j)].y = frame.joints[std::size_t(j)].y;
    }
    out.push_back(std::move(frame));
  }
  return out;
}

MatD select_joints(const std::vector<KeypointFrame>& frames,
                   const SkeletonLayout& layout, const std::string& code) {
  const std::vector<int> joints = code_joints(code);
  for (int ci : joints) {
    const int slot = layout.canonical_index[std::size_t(ci)];
    if (slot < 0 || slot >= layout.joint_count)
      throw ConfigError("layout " + layout.name + " lacks joint '" +
                        canonical_joint_names()[std::size_t(ci)] + "'");
  }
  MatD out(Eigen::Index(frames.size()), Eigen::Index(2 * joints.size()));
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& fr = frames[f];
    if (int(fr.joints.size()) != layout.joint_count)
      throw ShapeError("frame " + std::to_string(f) + " holds " +
                       std::to_string(fr.joints.size()) +
                       " joints, layout expects " +
                       std::to_string(layout.joint_count));
    for (std::size_t k = 0; k < joints.size(); ++k) {
      const auto& jt =
          fr.joints[std::size_t(layout.canonical_index[std::size_t(
              joints[k])])];
      out(Eigen::Index(f), Eigen::Index(2 * k)) = jt.x;
      out(Eigen::Index(f), Eigen::Index(2 * k + 1)) = jt.y;
    }
  }
  return out;
}

MatD subset_joint_columns(const MatD& joints2d,
                          const std::vector<std::string>& from,
                          const std::string& code) {
  const auto wanted = code_joint_names(code);
  MatD out(joints2d.rows(), Eigen::Index(2 * wanted.size()));
  for (std::size_t k = 0; k < wanted.size(); ++k) {
    auto it = std::find(from.begin(), from.end(), wanted[k]);
    if (it == from.end())
      throw ConfigError("joint '" + wanted[k] + "' not present in trial");
    const Eigen::Index src = 2 * Eigen::Index(it - from.begin());
    out.col(Eigen::Index(2 * k)) = joints2d.col(src);
    out.col(Eigen::Index(2 * k + 1)) = joints2d.col(src + 1);
  }
  return out;
}

}  // namespace motionauth
