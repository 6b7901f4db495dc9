#include "motionauth/data/corpus.hpp"

#include <algorithm>
#include <cstring>

#include "motionauth/data/container.hpp"
#include "motionauth/data/keypoints.hpp"
#include "motionauth/errors.hpp"
#include "motionauth/rng.hpp"

namespace motionauth {

std::vector<std::string> Corpus::user_ids() const {
  std::vector<std::string> ids;
  for (const auto& t : trials)
    if (ids.empty() || ids.back() != t.user_id) ids.push_back(t.user_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

const MotionTrial* Corpus::find(const std::string& user, int session,
                                int trial) const {
  for (const auto& t : trials)
    if (t.user_id == user && t.session == session && t.trial == trial)
      return &t;
  return nullptr;
}

std::vector<const MotionTrial*> Corpus::user_session(const std::string& user,
                                                     int session) const {
  std::vector<const MotionTrial*> out;
  for (const auto& t : trials)
    if (t.user_id == user && t.session == session) out.push_back(&t);
  return out;
}

bool Corpus::has_session(const std::string& user, int session) const {
  for (const auto& t : trials)
    if (t.user_id == user && t.session == session) return true;
  return false;
}

void sort_trials(Corpus& corpus) {
  std::sort(corpus.trials.begin(), corpus.trials.end(),
            [](const MotionTrial& a, const MotionTrial& b) {
              return std::tie(a.user_id, a.session, a.trial) <
                     std::tie(b.user_id, b.session, b.trial);
            });
}

Corpus load_corpus(const DatasetManifest& manifest) {
  Corpus corpus;
  corpus.layout = manifest.layout;
  corpus.image_width = manifest.image_width;
  corpus.image_height = manifest.image_height;
  corpus.t_samples = manifest.t_samples;
  const SkeletonLayout& layout = skeleton_layout(manifest.layout);
  for (const auto& user : manifest.users) {
    for (const auto& session : user.sessions) {
      for (const auto& tf : session.trials) {
        MotionTrial trial;
        trial.user_id = user.id;
        trial.session = session.session;
        trial.trial = tf.trial;
        trial.joint_names = canonical_joint_names();
        const auto frames = parse_keypoint_file(
            manifest.base_dir / tf.keypoints, layout);
        MatD selected = select_joints(frames, layout, "WESHKA");
        trial.joints2d =
            downsample_uniform(selected, Eigen::Index(manifest.t_samples));
        trial.controller3d =
            read_controller_csv(manifest.base_dir / tf.controller);
        if (trial.controller3d.rows() != manifest.t_samples)
          throw ParseError("controller file " + tf.controller + " holds " +
                           std::to_string(trial.controller3d.rows()) +
                           " samples, expected " +
                           std::to_string(manifest.t_samples));
        validate_trial(trial, manifest.t_samples);
        corpus.trials.push_back(std::move(trial));
      }
    }
  }
  sort_trials(corpus);
  corpus.digest = compute_corpus_digest(corpus);
  return corpus;
}

void normalize_corpus(Corpus& corpus) {
  if (corpus.normalized) return;
  corpus.stats = compute_norm_stats(corpus.trials, corpus.image_width,
                                    corpus.image_height);
  for (auto& t : corpus.trials) t = normalize_trial(std::move(t), corpus.stats);
  corpus.normalized = true;
}

std::uint64_t compute_corpus_digest(const Corpus& corpus) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : corpus.trials) {
    h = fnv1a(t.user_id.data(), t.user_id.size(), h);
    h = fnv1a(&t.session, sizeof t.session, h);
    h = fnv1a(&t.trial, sizeof t.trial, h);
    h = fnv1a(t.joints2d.data(), sizeof(double) * std::size_t(t.joints2d.size()),
              h);
    h = fnv1a(t.controller3d.data(),
              sizeof(double) * std::size_t(t.controller3d.size()), h);
  }
  return h;
}

void save_trials(const Corpus& corpus, const std::filesystem::path& path) {
  nlohmann::json header;
  header["kind"] = "trials";
  header["layout"] = corpus.layout;
  header["image_width"] = corpus.image_width;
  header["image_height"] = corpus.image_height;
  header["t_samples"] = corpus.t_samples;
  header["normalized"] = corpus.normalized;
  header["digest"] = corpus.digest;
  header["dtype"] = "f64";
  if (corpus.normalized) {
    header["norm_stats"] = {
        {"mean3", corpus.stats.mean3},
        {"std3", corpus.stats.std3},
        {"std_floored", corpus.stats.std_floored},
        {"image_width", corpus.stats.image_width},
        {"image_height", corpus.stats.image_height}};
  }
  nlohmann::json list = nlohmann::json::array();
  std::vector<char> payload;
  for (const auto& t : corpus.trials) {
    nlohmann::json jt;
    jt["user"] = t.user_id;
    jt["session"] = t.session;
    jt["trial"] = t.trial;
    jt["joint_names"] = t.joint_names;
    jt["joints2d_rows"] = t.joints2d.rows();
    jt["joints2d_cols"] = t.joints2d.cols();
    jt["offset"] = payload.size();
    const auto append = [&payload](const MatD& m) {
      const std::size_t bytes = sizeof(double) * std::size_t(m.size());
      const std::size_t at = payload.size();
      payload.resize(at + bytes);
      std::memcpy(payload.data() + at, m.data(), bytes);
    };
    append(t.joints2d);
    append(t.controller3d);
    list.push_back(std::move(jt));
  }
  header["trials"] = std::move(list);
  write_container(path, header, payload.data(), payload.size());
}

Corpus load_trials(const std::filesystem::path& path) {
  Container c = read_container(path);
  if (c.header.value("kind", "") != "trials")
    throw ParseError(path.string() + ": not a trial store");
  Corpus corpus;
  corpus.layout = c.header.at("layout").get<std::string>();
  corpus.image_width = c.header.at("image_width").get<double>();
  corpus.image_height = c.header.at("image_height").get<double>();
  corpus.t_samples = c.header.at("t_samples").get<int>();
  corpus.normalized = c.header.value("normalized", false);
  corpus.digest = c.header.at("digest").get<std::uint64_t>();
  if (corpus.normalized) {
    const auto& ns = c.header.at("norm_stats");
    corpus.stats.mean3 = ns.at("mean3").get<std::array<double, 3>>();
    corpus.stats.std3 = ns.at("std3").get<std::array<double, 3>>();
    corpus.stats.std_floored =
        ns.at("std_floored").get<std::array<bool, 3>>();
    corpus.stats.image_width = ns.at("image_width").get<double>();
    corpus.stats.image_height = ns.at("image_height").get<double>();
  }
  for (const auto& jt : c.header.at("trials")) {
    MotionTrial t;
    t.user_id = jt.at("user").get<std::string>();
    t.session = jt.at("session").get<int>();
    t.trial = jt.at("trial").get<int>();
    t.joint_names = jt.at("joint_names").get<std::vector<std::string>>();
    const Eigen::Index r = jt.at("joints2d_rows").get<Eigen::Index>();
    const Eigen::Index cc = jt.at("joints2d_cols").get<Eigen::Index>();
    std::size_t off = jt.at("offset").get<std::size_t>();
    const std::size_t j2_bytes = sizeof(double) * std::size_t(r * cc);
    const std::size_t c3_bytes = sizeof(double) * std::size_t(r * 3);
    if (off + j2_bytes + c3_bytes > c.payload.size())
      throw ParseError(path.string() + ": trial payload out of range");
    t.joints2d.resize(r, cc);
    std::memcpy(t.joints2d.data(), c.payload.data() + off, j2_bytes);
    t.controller3d.resize(r, 3);
    std::memcpy(t.controller3d.data(), c.payload.data() + off + j2_bytes,
                c3_bytes);
    corpus.trials.push_back(std::move(t));
  }
  return corpus;
}

}  // namespace motionauth
