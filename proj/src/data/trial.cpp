#include "motionauth/data/trial.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "motionauth/errors.hpp"

namespace motionauth {

void validate_trial(const MotionTrial& t, int expected_t) {
  if (t.joints2d.rows() != expected_t || t.controller3d.rows() != expected_t)
    throw ShapeError("trial " + t.user_id + "/s" + std::to_string(t.session) +
                     "/t" + std::to_string(t.trial) + ": joints2d has " +
                     std::to_string(t.joints2d.rows()) +
                     " samples, controller3d has " +
                     std::to_string(t.controller3d.rows()) + ", expected " +
                     std::to_string(expected_t));
  if (t.controller3d.cols() != 3)
    throw ShapeError("controller track must have 3 columns");
  if (t.joints2d.cols() != Eigen::Index(2 * t.joint_names.size()))
    throw ShapeError("joints2d column count does not match joint_names");
  if (!all_finite(t.joints2d) || !all_finite(t.controller3d))
    throw NumericalError("trial " + t.user_id + ": non-finite samples");
}

std::vector<Eigen::Index> downsample_indices(Eigen::Index f_src,
                                             Eigen::Index t_dst) {
  if (t_dst < 1) throw ConfigError("downsample: target length must be >= 1");
  if (f_src < t_dst)
    throw ConfigError("downsample: cannot map " + std::to_string(f_src) +
                      " source frames onto " + std::to_string(t_dst) +
                      " samples (no upsampling)");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(t_dst));
  if (t_dst == 1) {
    idx[0] = 0;
    return idx;
  }
  for (Eigen::Index i = 0; i < t_dst; ++i)
    idx[std::size_t(i)] = Eigen::Index(
        std::lround(double(i) * double(f_src - 1) / double(t_dst - 1)));
  return idx;
}

MatD downsample_uniform(const MatD& frames, Eigen::Index t_dst) {
  const auto idx = downsample_indices(frames.rows(), t_dst);
  MatD out(t_dst, frames.cols());
  for (Eigen::Index i = 0; i < t_dst; ++i)
    out.row(i) = frames.row(idx[std::size_t(i)]);
  return out;
}

NormStats compute_norm_stats(const std::vector<MotionTrial>& trials,
                             double image_width, double image_height) {
  if (image_width <= 0 || image_height <= 0)
    throw ConfigError("norm stats: image extent must be positive");
  NormStats s;
  s.image_width = image_width;
  s.image_height = image_height;
  long n = 0;
  std::array<double, 3> sum{0, 0, 0};
  for (const auto& t : trials) {
    if (t.session != 1) continue;  // training split only
    for (Eigen::Index i = 0; i < t.controller3d.rows(); ++i)
      for (int a = 0; a < 3; ++a) sum[a] += t.controller3d(i, a);
    n += long(t.controller3d.rows());
  }
  if (n == 0) throw ConfigError("norm stats: no session-1 trials in corpus");
  for (int a = 0; a < 3; ++a) s.mean3[a] = sum[a] / double(n);
  std::array<double, 3> sq{0, 0, 0};
  for (const auto& t : trials) {
    if (t.session != 1) continue;
    for (Eigen::Index i = 0; i < t.controller3d.rows(); ++i)
      for (int a = 0; a < 3; ++a) {
        const double d = t.controller3d(i, a) - s.mean3[a];
        sq[a] += d * d;
      }
  }
  for (int a = 0; a < 3; ++a) {
    const double var = sq[a] / double(n);
    if (var <= 0) {
      s.std3[a] = 1.0;
      s.std_floored[a] = true;
    } else {
      s.std3[a] = std::sqrt(var);
    }
  }
  return s;
}

MotionTrial normalize_trial(MotionTrial trial, const NormStats& stats) {
  for (Eigen::Index c = 0; c < trial.joints2d.cols(); ++c)
    trial.joints2d.col(c) /=
        (c % 2 == 0) ? stats.image_width : stats.image_height;
  for (int a = 0; a < 3; ++a)
    trial.controller3d.col(a) =
        (trial.controller3d.col(a).array() - stats.mean3[a]) / stats.std3[a];
  return trial;
}

MotionTrial denormalize_trial(MotionTrial trial, const NormStats& stats) {
  for (Eigen::Index c = 0; c < trial.joints2d.cols(); ++c)
    trial.joints2d.col(c) *=
        (c % 2 == 0) ? stats.image_width : stats.image_height;
  for (int a = 0; a < 3; ++a)
    trial.controller3d.col(a) =
        trial.controller3d.col(a).array() * stats.std3[a] + stats.mean3[a];
  return trial;
}

MatD read_controller_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open controller file " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("controller file " + path.string() + " is empty");
  if (line.rfind("t,x,y,z", 0) != 0)
    throw ParseError("controller file " + path.string() +
                     ": expected header 't,x,y,z', got '" + line + "'");
  std::vector<std::array<double, 3>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::array<double, 4> vals{};
    for (int f = 0; f < 4; ++f) {
      if (!std::getline(ls, field, ','))
        throw ParseError(path.string() + ":" + std::to_string(lineno) +
                         ": expected 4 comma-separated fields");
      try {
        vals[std::size_t(f)] = std::stod(field);
      } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(lineno) +
                         ": '" + field + "' is not a number");
      }
    }
    if (!std::isfinite(vals[1]) || !std::isfinite(vals[2]) ||
        !std::isfinite(vals[3]))
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": non-finite coordinate");
    rows.push_back({vals[1], vals[2], vals[3]});
  }
  MatD out(Eigen::Index(rows.size()), 3);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int a = 0; a < 3; ++a) out(Eigen::Index(i), a) = rows[i][a];
  return out;
}

void write_controller_csv(const std::filesystem::path& path,
                          const MatD& track) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write controller file " + path.string());
  out << "t,x,y,z\n";
  char buf[32];
  for (Eigen::Index i = 0; i < track.rows(); ++i) {
    out << i;
    for (int a = 0; a < 3; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", track(i, a));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace motionauth
