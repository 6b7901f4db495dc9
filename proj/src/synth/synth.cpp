#include "motionauth/synth/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "motionauth/data/keypoints.hpp"
#include "motionauth/errors.hpp"
#include "motionauth/rng.hpp"

namespace motionauth {

namespace {

constexpr double kTau = 6.283185307179586;

double eval_profile(const MotionProfile& p, double u, double release) {
  return p.base + p.amp * std::sin(kTau * p.freq * u + p.phase) +
         p.ramp * (u - release);
}

// Per-trial additive disturbances. Angles (not positions) are perturbed so
// limb lengths stay exact.
struct TrialNoise {
  struct Wobble {
    double offset = 0, amp = 0, phase = 0;
    double at(double u) const {
      return offset + amp * std::sin(kTau * u + kTau * phase);
    }
  };
  Wobble shoulder, elbow, hip, knee, depth;
  double anchor_dx = 0, anchor_dy = 0;
};

TrialNoise draw_trial_noise(Rng& rng, double scale) {
  TrialNoise n;
  for (auto* w : {&n.shoulder, &n.elbow, &n.hip, &n.knee}) {
    w->offset = 0.03 * scale * rng.normal();
    w->amp = 0.02 * scale * std::fabs(rng.normal());
    w->phase = rng.uniform();
  }
  n.depth.offset = 0.01 * scale * rng.normal();
  n.depth.amp = 0.008 * scale * std::fabs(rng.normal());
  n.depth.phase = rng.uniform();
  n.anchor_dx = 3.0 * scale * rng.normal();
  n.anchor_dy = 3.0 * scale * rng.normal();
  return n;
}

struct SessionDrift {
  double shoulder_base = 0, elbow_base = 0, phase = 0;
  double anchor_dx = 0, anchor_dy = 0;
  double depth = 0;
};

SessionDrift draw_session_drift(const SynthConfig& cfg, int user_index,
                                int session) {
  SessionDrift d;
  if (session == 1) return d;  // session 1 is the reference behavior
  Rng rng(hash_combine(hash_combine(cfg.seed, "drift"),
                       std::uint64_t(user_index) * 811 +
                           std::uint64_t(session)));
  const double s = cfg.noise_scale;
  d.shoulder_base = 0.02 * s * rng.normal();
  d.elbow_base = 0.02 * s * rng.normal();
  d.phase = 0.05 * s * rng.normal();
  d.anchor_dx = 5.0 * s * rng.normal();
  d.anchor_dy = 5.0 * s * rng.normal();
  d.depth = 0.01 * s * rng.normal();
  return d;
}

struct JointPose {
  // canonical order: wrist, elbow, shoulder, hip, knee, ankle
  double x[6], y[6];
  double depth = 0;  // controller z before lift
};

JointPose pose_at(const UserSignature& sig, const TrialNoise& noise,
                  const SessionDrift& drift, double u) {
  const double th_s = eval_profile(sig.shoulder, u, sig.release_frac) +
                      noise.shoulder.at(u) + drift.shoulder_base;
  const double th_e = eval_profile(sig.elbow, u, sig.release_frac) +
                      noise.elbow.at(u) + drift.elbow_base;
  const double th_h = eval_profile(sig.hip, u, sig.release_frac) +
                      noise.hip.at(u);
  const double th_k = eval_profile(sig.knee, u, sig.release_frac) +
                      noise.knee.at(u);
  const double ax = sig.anchor_x + noise.anchor_dx + drift.anchor_dx;
  const double ay = sig.anchor_y + noise.anchor_dy + drift.anchor_dy;

  JointPose p{};
  // hip anchors the chain; image y grows downward
  p.x[3] = ax;
  p.y[3] = ay;
  p.x[2] = ax;
  p.y[2] = ay - sig.torso;
  p.x[1] = p.x[2] + sig.upper_arm * std::cos(th_s);
  p.y[1] = p.y[2] + sig.upper_arm * std::sin(th_s);
  p.x[0] = p.x[1] + sig.forearm * std::cos(th_s + th_e);
  p.y[0] = p.y[1] + sig.forearm * std::sin(th_s + th_e);
  p.x[4] = p.x[3] + sig.thigh * std::cos(th_h);
  p.y[4] = p.y[3] + sig.thigh * std::sin(th_h);
  p.x[5] = p.x[4] + sig.shank * std::cos(th_h + th_k);
  p.y[5] = p.y[4] + sig.shank * std::sin(th_h + th_k);

  p.depth = sig.depth_amp * std::sin(kTau * sig.depth_freq * u +
                                     sig.depth_phase + drift.phase) +
            sig.depth_ramp * (u - sig.release_frac) + noise.depth.at(u) +
            drift.depth;
  return p;
}

}  // namespace

UserSignature make_user_signature(const SynthConfig& cfg, int user_index) {
  Rng rng(hash_combine(hash_combine(cfg.seed, "signature"),
                       std::uint64_t(user_index)));
  const int u = user_index;
  const auto jit = [&rng](double s) { return s * (rng.uniform() - 0.5); };

  UserSignature sig;
  // Core lattice: consecutive users are at least kSignatureSeparationMargin
  // apart in shoulder and depth frequency even after jitter.
  sig.shoulder = {1.35 + 0.06 * (u % 3) + jit(0.02),
                  0.50 + 0.09 * (u % 5) + jit(0.03),
                  0.80 + 0.21 * u + jit(0.04),
                  0.9 * u + jit(0.1),
                  0.85 + 0.12 * (u % 3) + jit(0.05)};
  sig.elbow = {-0.95 - 0.07 * (u % 4) + jit(0.02),
               0.42 + 0.08 * ((u + 1) % 4) + jit(0.03),
               1.05 + 0.17 * (u % 6) + jit(0.04),
               1.3 * u + 0.4 + jit(0.1),
               -0.65 - 0.09 * (u % 2) + jit(0.05)};
  sig.hip = {1.52 + jit(0.01), 0.05 + 0.015 * (u % 3), 0.6 + 0.1 * (u % 4),
             0.5 * u, 0.04};
  sig.knee = {-0.12 - 0.03 * (u % 2), 0.06 + 0.02 * (u % 4),
              0.7 + 0.12 * (u % 3), 0.8 * u + 0.2, 0.05};

  sig.upper_arm = 150 + 12 * (u % 4) + jit(4);
  sig.forearm = 122 + 9 * ((u + 1) % 4) + jit(3);
  sig.thigh = 205 + 10 * (u % 3) + jit(4);
  sig.shank = 182 + 8 * (u % 5) + jit(3);
  sig.torso = 225 + 6 * (u % 4) + jit(3);
  sig.anchor_x = 0.42 * cfg.image_width + 35 * (u % 3) + jit(6);
  sig.anchor_y = 0.55 * cfg.image_height + 20 * (u % 2) + jit(6);

  sig.depth_amp = 0.22 + 0.05 * (u % 4) + jit(0.01);
  sig.depth_freq = 0.70 + 0.19 * u + jit(0.04);
  sig.depth_phase = 0.7 * u + jit(0.1);
  sig.depth_ramp = 0.35 + 0.08 * (u % 3) + jit(0.02);
  sig.scale3d = 1.5e-3;
  sig.release_frac = 0.55 + 0.05 * (u % 3) + jit(0.02);
  sig.noise_scale = cfg.noise_scale;
  return sig;
}

namespace {

// Builds the camera-rate keypoint frames and the device-rate controller
// track for one trial.
void simulate_trial(const SynthConfig& cfg, const UserSignature& sig,
                    int user_index, int session, int trial,
                    std::vector<KeypointFrame>* frames_out,
                    MatD* controller_out) {
  Rng noise_rng(hash_combine(
      hash_combine(cfg.seed, "trial"),
      (std::uint64_t(user_index) * 97 + std::uint64_t(session)) * 1009 +
          std::uint64_t(trial)));
  const TrialNoise noise = draw_trial_noise(noise_rng, sig.noise_scale);
  const SessionDrift drift = draw_session_drift(cfg, user_index, session);
  const SkeletonLayout& layout = skeleton_layout("body25");

  frames_out->clear();
  frames_out->reserve(std::size_t(cfg.video_frames));
  for (int f = 0; f < cfg.video_frames; ++f) {
    const double u = double(f) / double(cfg.video_frames - 1);
    const JointPose pose = pose_at(sig, noise, drift, u);
    KeypointFrame frame;
    frame.frame_index = f;
    frame.joints.assign(std::size_t(layout.joint_count), KeypointJoint{});
    for (int j = 0; j < 6; ++j) {
      auto& slot = frame.joints[std::size_t(layout.canonical_index[
          std::size_t(j)])];
      slot.x = pose.x[j];
      slot.y = pose.y[j];
      slot.confidence = 0.95;
    }
    frames_out->push_back(std::move(frame));
  }

  controller_out->resize(cfg.t_samples, 3);
  const double cx = cfg.image_width / 2, cy = cfg.image_height / 2;
  for (int i = 0; i < cfg.t_samples; ++i) {
    const double u = double(i) / double(cfg.t_samples - 1);
    const JointPose pose = pose_at(sig, noise, drift, u);
    (*controller_out)(i, 0) = (pose.x[0] - cx) * sig.scale3d;
    (*controller_out)(i, 1) = (cy - pose.y[0]) * sig.scale3d;
    (*controller_out)(i, 2) = pose.depth;
  }
}

std::string user_id_of(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "u%02d", index);
  return buf;
}

}  // namespace

Corpus generate_corpus(const SynthConfig& cfg) {
  if (cfg.n_users < 2)
    throw ConfigError("synthetic corpus needs at least 2 users");
  Corpus corpus;
  corpus.layout = "body25";
  corpus.image_width = cfg.image_width;
  corpus.image_height = cfg.image_height;
  corpus.t_samples = cfg.t_samples;
  const SkeletonLayout& layout = skeleton_layout(corpus.layout);
  for (int u = 0; u < cfg.n_users; ++u) {
    const UserSignature sig = make_user_signature(cfg, u);
    for (int s = 1; s <= cfg.sessions; ++s) {
      for (int t = 1; t <= cfg.trials; ++t) {
        std::vector<KeypointFrame> frames;
        MotionTrial trial;
        trial.user_id = user_id_of(u);
        trial.session = s;
        trial.trial = t;
        trial.joint_names = canonical_joint_names();
        simulate_trial(cfg, sig, u, s, t, &frames, &trial.controller3d);
        trial.joints2d = downsample_uniform(
            select_joints(frames, layout, "WESHKA"),
            Eigen::Index(cfg.t_samples));
        validate_trial(trial, cfg.t_samples);
        corpus.trials.push_back(std::move(trial));
      }
    }
  }
  sort_trials(corpus);
  corpus.digest = compute_corpus_digest(corpus);
  return corpus;
}

void emit_corpus_files(const SynthConfig& cfg,
                       const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const SkeletonLayout& layout = skeleton_layout("body25");
  DatasetManifest manifest;
  manifest.layout = "body25";
  manifest.image_width = cfg.image_width;
  manifest.image_height = cfg.image_height;
  manifest.t_samples = cfg.t_samples;

  for (int u = 0; u < cfg.n_users; ++u) {
    const UserSignature sig = make_user_signature(cfg, u);
    UserEntry ue;
    ue.id = user_id_of(u);
    for (int s = 1; s <= cfg.sessions; ++s) {
      SessionEntry se;
      se.session = s;
      const fs::path subdir = dir / ue.id / ("s" + std::to_string(s));
      fs::create_directories(subdir);
      for (int t = 1; t <= cfg.trials; ++t) {
        std::vector<KeypointFrame> frames;
        MatD controller;
        simulate_trial(cfg, sig, u, s, t, &frames, &controller);

        char stem[32];
        std::snprintf(stem, sizeof stem, "t%02d", t);
        const fs::path kp_path = subdir / (std::string(stem) +
                                           "_keypoints.json");
        const fs::path ct_path = subdir / (std::string(stem) +
                                           "_controller.csv");

        nlohmann::json doc;
        doc["layout"] = layout.name;
        nlohmann::json jframes = nlohmann::json::array();
        for (const auto& frame : frames) {
          nlohmann::json kp = nlohmann::json::array();
          for (const auto& j : frame.joints) {
            kp.push_back(j.x);
            kp.push_back(j.y);
            kp.push_back(j.confidence);
          }
          jframes.push_back(
              {{"frame_index", frame.frame_index},
               {"people",
                nlohmann::json::array({{{"pose_keypoints_2d", kp}}})}});
        }
        doc["frames"] = std::move(jframes);
        std::ofstream out(kp_path);
        if (!out) throw ConfigError("cannot write " + kp_path.string());
        out << doc.dump() << '\n';
        out.close();
        write_controller_csv(ct_path, controller);

        TrialFiles tf;
        tf.trial = t;
        tf.keypoints = fs::relative(kp_path, dir).string();
        tf.controller = fs::relative(ct_path, dir).string();
        se.trials.push_back(std::move(tf));
      }
      ue.sessions.push_back(std::move(se));
    }
    manifest.users.push_back(std::move(ue));
  }
  write_manifest(manifest, dir / "manifest.json");
}

double oracle_eer(const std::vector<double>& genuine,
                  const std::vector<double>& impostor,
                  double* threshold_out) {
  if (genuine.empty() || impostor.empty())
    throw ConfigError("oracle_eer: empty score list");
  std::vector<double> candidates = genuine;
  candidates.insert(candidates.end(), impostor.begin(), impostor.end());
  std::sort(candidates.begin(), candidates.end());
  double best_gap = std::numeric_limits<double>::infinity();
  double best_eer = 0.5, best_thr = candidates.front();
  for (double thr : candidates) {
    long fa = 0, fr = 0;
    for (double s : impostor)
      if (s >= thr) ++fa;
    for (double s : genuine)
      if (s < thr) ++fr;
    const double far = double(fa) / double(impostor.size());
    const double frr = double(fr) / double(genuine.size());
    const double gap = std::fabs(far - frr);
    if (gap < best_gap) {
      best_gap = gap;
      best_eer = 0.5 * (far + frr);
      best_thr = thr;
    }
  }
  if (threshold_out) *threshold_out = best_thr;
  return best_eer;
}

std::vector<int> oracle_windows(int t_total, int w, int stride) {
  std::vector<int> out;
  for (int s = 0; s <= t_total - w; ++s)
    if (s % stride == 0) out.push_back(s);
  return out;
}

}  // namespace motionauth
