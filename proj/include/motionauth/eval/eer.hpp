#pragma once

#include <vector>

namespace motionauth {

struct RocPoint {
  double threshold = 0;
  double far = 0;  // impostor scores >= threshold
  double frr = 0;  // genuine scores < threshold
};

struct EerResult {
  double eer = 0;
  double threshold = 0;
  std::vector<RocPoint> curve;  // ascending threshold over the score union
};

// Sweeps the sorted union of scores; EER is (FAR+FRR)/2 at the threshold
// minimizing |FAR-FRR|, ties broken toward the lower threshold.
EerResult compute_eer(const std::vector<double>& genuine_scores,
                      const std::vector<double>& impostor_scores);

}  // namespace motionauth
