#include "motionauth/data/manifest.hpp"

#include <json.hpp>

#include <fstream>

#include "motionauth/errors.hpp"

namespace motionauth {

using nlohmann::json;

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("manifest " + path.string() + ": " + e.what());
  }
  DatasetManifest m;
  m.base_dir = path.parent_path();
  try {
    m.layout = doc.value("layout", std::string("body25"));
    m.image_width = doc.at("image_width").get<double>();
    m.image_height = doc.at("image_height").get<double>();
    m.t_samples = doc.value("t_samples", 135);
    for (const auto& u : doc.at("users")) {
      UserEntry ue;
      ue.id = u.at("id").get<std::string>();
      for (const auto& s : u.at("sessions")) {
        SessionEntry se;
        se.session = s.at("session").get<int>();
        for (const auto& t : s.at("trials")) {
          TrialFiles tf;
          tf.trial = t.at("trial").get<int>();
          tf.keypoints = t.at("keypoints").get<std::string>();
          tf.controller = t.at("controller").get<std::string>();
          se.trials.push_back(std::move(tf));
        }
        ue.sessions.push_back(std::move(se));
      }
      m.users.push_back(std::move(ue));
    }
  } catch (const json::exception& e) {
    throw ParseError("manifest " + path.string() + ": " + e.what());
  }
  if (m.users.empty())
    throw ConfigError("manifest " + path.string() + " lists no users");
  return m;
}

void write_manifest(const DatasetManifest& m,
                    const std::filesystem::path& path) {
  json doc;
  doc["layout"] = m.layout;
  doc["image_width"] = m.image_width;
  doc["image_height"] = m.image_height;
  doc["t_samples"] = m.t_samples;
  json users = json::array();
  for (const auto& u : m.users) {
    json ju;
    ju["id"] = u.id;
    json sessions = json::array();
    for (const auto& s : u.sessions) {
      json js;
      js["session"] = s.session;
      json trials = json::array();
      for (const auto& t : s.trials) {
        trials.push_back({{"trial", t.trial},
                          {"keypoints", t.keypoints},
                          {"controller", t.controller}});
      }
      js["trials"] = trials;
      sessions.push_back(js);
    }
    ju["sessions"] = sessions;
    users.push_back(ju);
  }
  doc["users"] = users;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write manifest " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace motionauth
