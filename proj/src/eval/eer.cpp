#include "motionauth/eval/eer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "motionauth/errors.hpp"

namespace motionauth {

EerResult compute_eer(const std::vector<double>& genuine_scores,
                      const std::vector<double>& impostor_scores) {
  if (genuine_scores.empty() || impostor_scores.empty())
    throw ConfigError("compute_eer: empty score list");

  std::vector<double> thresholds = genuine_scores;
  thresholds.insert(thresholds.end(), impostor_scores.begin(),
                    impostor_scores.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  std::vector<double> gen = genuine_scores;
  std::vector<double> imp = impostor_scores;
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());
  const double n_gen = double(gen.size()), n_imp = double(imp.size());

  EerResult r;
  r.curve.reserve(thresholds.size());
  double best_gap = std::numeric_limits<double>::infinity();
  for (double thr : thresholds) {
    // impostor scores >= thr
    const auto imp_lo = std::lower_bound(imp.begin(), imp.end(), thr);
    const double far = double(imp.end() - imp_lo) / n_imp;
    // genuine scores < thr
    const auto gen_lo = std::lower_bound(gen.begin(), gen.end(), thr);
    const double frr = double(gen_lo - gen.begin()) / n_gen;
    r.curve.push_back({thr, far, frr});
    const double gap = std::fabs(far - frr);
    if (gap < best_gap) {
      best_gap = gap;
      r.eer = 0.5 * (far + frr);
      r.threshold = thr;
    }
  }
  return r;
}

}  // namespace motionauth
