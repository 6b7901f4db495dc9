#include "motionauth/data/windows.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include "motionauth/data/container.hpp"
#include "motionauth/data/keypoints.hpp"
#include "motionauth/errors.hpp"
#include "motionauth/rng.hpp"

namespace motionauth {

std::vector<int> enumerate_windows(int t_total, int w, int stride) {
  if (w < 1) throw ConfigError("enumerate_windows: w must be >= 1");
  if (stride < 1) throw ConfigError("enumerate_windows: stride must be >= 1");
  if (w > t_total)
    throw ConfigError("enumerate_windows: window " + std::to_string(w) +
                      " exceeds series length " + std::to_string(t_total) +
                      " (empty domain)");
  std::vector<int> starts;
  for (int s = 0; s + w <= t_total; s += stride) starts.push_back(s);
  return starts;
}

namespace {

// Per-trial feature tensor for a variant: code-selected 2D joints, or the 3D
// controller track for the 3D-input baseline.
struct TrialView {
  MatD input;   // (T x input_features)
  MatD target;  // (T x output_dim)
};

TrialView make_view(const MotionTrial& t, const ExperimentVariant& variant) {
  TrialView v;
  if (variant.input == ExperimentVariant::InputKind::controller3d)
    v.input = t.controller3d;
  else
    v.input = subset_joint_columns(t.joints2d, t.joint_names, variant.code);
  if (variant.target == ExperimentVariant::TargetKind::controller3d)
    v.target = t.controller3d;
  else
    v.target = subset_joint_columns(t.joints2d, t.joint_names, "W");
  return v;
}

WindowPair make_pair(const MotionTrial& t, const TrialView& view, int start,
                     int w, int w_in, int label) {
  WindowPair p;
  p.input = view.input.middleRows(start, w_in).cast<float>();
  p.target = view.target.middleRows(start, w).cast<float>();
  p.label = label;
  p.start = start;
  p.source = TrialKey{t.user_id, t.session, t.trial};
  return p;
}

}  // namespace

WindowSet build_window_set(const Corpus& corpus,
                           const ExperimentVariant& variant,
                           const std::string& user, int session, int w,
                           int w_in, int stride, std::uint64_t seed) {
  if (w_in >= w)
    throw ConfigError("build_window_set: w_in " + std::to_string(w_in) +
                      " must be < w " + std::to_string(w));
  const auto own = corpus.user_session(user, session);
  if (own.empty())
    throw ConfigError("user '" + user + "' has no trials in session " +
                      std::to_string(session));
  std::vector<std::string> others;
  for (const auto& id : corpus.user_ids())
    if (id != user && corpus.has_session(id, session)) others.push_back(id);
  if (others.empty())
    throw ConfigError("no other user has trials in session " +
                      std::to_string(session) +
                      ": cannot build impostor pairs for '" + user + "'");

  std::map<const MotionTrial*, TrialView> views;
  const auto view_of = [&](const MotionTrial* t) -> const TrialView& {
    auto it = views.find(t);
    if (it == views.end())
      it = views.emplace(t, make_view(*t, variant)).first;
    return it->second;
  };

  WindowSet set;
  set.w = w;
  set.w_in = w_in;
  set.stride = stride;
  set.variant = variant.name;
  set.user = user;
  set.session = session;
  set.seed = seed;
  set.corpus_digest = corpus.digest;

  const auto starts = enumerate_windows(corpus.t_samples, w, stride);
  for (const MotionTrial* t : own)
    for (int s : starts)
      set.genuine.push_back(make_pair(*t, view_of(t), s, w, w_in, 1));

  // Impostors come from the same session as the split so that train and
  // test sets can never share a (source, start) pair.
  Rng rng(seed);
  for (const auto& gp : set.genuine) {
    const std::string& other = others[rng.below(others.size())];
    const auto pool = corpus.user_session(other, session);
    const MotionTrial* t = pool[rng.below(pool.size())];
    set.impostor.push_back(make_pair(*t, view_of(t), gp.start, w, w_in, 0));
  }
  return set;
}

SplitWindows session_split(const Corpus& corpus,
                           const ExperimentVariant& variant,
                           const std::string& user, int w, int w_in,
                           int stride, std::uint64_t seed) {
  for (int session : {1, 2})
    if (!corpus.has_session(user, session))
      throw ConfigError("user '" + user + "' is missing session " +
                        std::to_string(session));
  SplitWindows out;
  out.train = build_window_set(corpus, variant, user, 1, w, w_in, stride,
                               hash_combine(seed, "train"));
  out.test = build_window_set(corpus, variant, user, 2, w, w_in, stride,
                              hash_combine(seed, "test"));
  return out;
}

void save_window_set(const WindowSet& set, const std::filesystem::path& path) {
  nlohmann::json header;
  header["kind"] = "windows";
  header["w"] = set.w;
  header["w_in"] = set.w_in;
  header["stride"] = set.stride;
  header["variant"] = set.variant;
  header["user"] = set.user;
  header["session"] = set.session;
  header["seed"] = set.seed;
  header["corpus_digest"] = set.corpus_digest;
  header["dtype"] = "f32";
  const auto& probe = set.genuine.empty() ? set.impostor : set.genuine;
  if (probe.empty()) throw ConfigError("refusing to save an empty window set");
  header["input_features"] = probe[0].input.cols();
  header["output_dim"] = probe[0].target.cols();

  nlohmann::json pairs = nlohmann::json::array();
  std::vector<char> payload;
  const auto append = [&payload](const MatF& m) {
    const std::size_t bytes = sizeof(float) * std::size_t(m.size());
    const std::size_t at = payload.size();
    payload.resize(at + bytes);
    std::memcpy(payload.data() + at, m.data(), bytes);
  };
  const auto emit = [&](const WindowPair& p) {
    pairs.push_back({{"label", p.label},
                     {"start", p.start},
                     {"user", p.source.user},
                     {"session", p.source.session},
                     {"trial", p.source.trial}});
    append(p.input);
    append(p.target);
  };
  for (const auto& p : set.genuine) emit(p);
  for (const auto& p : set.impostor) emit(p);
  header["genuine_count"] = set.genuine.size();
  header["pairs"] = std::move(pairs);
  write_container(path, header, payload.data(), payload.size());
}

WindowSet load_window_set(const std::filesystem::path& path) {
  Container c = read_container(path);
  if (c.header.value("kind", "") != "windows")
    throw ParseError(path.string() + ": not a window-set container");
  WindowSet set;
  set.w = c.header.at("w").get<int>();
  set.w_in = c.header.at("w_in").get<int>();
  set.stride = c.header.at("stride").get<int>();
  set.variant = c.header.at("variant").get<std::string>();
  set.user = c.header.at("user").get<std::string>();
  set.session = c.header.at("session").get<int>();
  set.seed = c.header.at("seed").get<std::uint64_t>();
  set.corpus_digest = c.header.at("corpus_digest").get<std::uint64_t>();
  const Eigen::Index nf = c.header.at("input_features").get<Eigen::Index>();
  const Eigen::Index od = c.header.at("output_dim").get<Eigen::Index>();
  const std::size_t genuine_count =
      c.header.at("genuine_count").get<std::size_t>();
  const std::size_t in_bytes = sizeof(float) * std::size_t(set.w_in * nf);
  const std::size_t tg_bytes = sizeof(float) * std::size_t(set.w * od);
  std::size_t off = 0;
  std::size_t i = 0;
  for (const auto& jp : c.header.at("pairs")) {
    if (off + in_bytes + tg_bytes > c.payload.size())
      throw ParseError(path.string() + ": window payload out of range");
    WindowPair p;
    p.label = jp.at("label").get<int>();
    p.start = jp.at("start").get<int>();
    p.source.user = jp.at("user").get<std::string>();
    p.source.session = jp.at("session").get<int>();
    p.source.trial = jp.at("trial").get<int>();
    p.input.resize(set.w_in, nf);
    std::memcpy(p.input.data(), c.payload.data() + off, in_bytes);
    p.target.resize(set.w, od);
    std::memcpy(p.target.data(), c.payload.data() + off + in_bytes, tg_bytes);
    off += in_bytes + tg_bytes;
    if (i++ < genuine_count)
      set.genuine.push_back(std::move(p));
    else
      set.impostor.push_back(std::move(p));
  }
  return set;
}

void dump_windows_csv(const WindowSet& set,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "kind,user,session,trial,start,label";
  const auto& probe = set.genuine.empty() ? set.impostor : set.genuine;
  if (probe.empty()) return;
  for (Eigen::Index i = 0; i < probe[0].input.size(); ++i) out << ",in" << i;
  for (Eigen::Index i = 0; i < probe[0].target.size(); ++i) out << ",tg" << i;
  out << '\n';
  char buf[32];
  const auto emit = [&](const WindowPair& p, const char* kind) {
    out << kind << ',' << p.source.user << ',' << p.source.session << ','
        << p.source.trial << ',' << p.start << ',' << p.label;
    for (Eigen::Index i = 0; i < p.input.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.9g", double(p.input.data()[i]));
      out << ',' << buf;
    }
    for (Eigen::Index i = 0; i < p.target.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.9g", double(p.target.data()[i]));
      out << ',' << buf;
    }
    out << '\n';
  };
  for (const auto& p : set.genuine) emit(p, "genuine");
  for (const auto& p : set.impostor) emit(p, "impostor");
}

}  // namespace motionauth
