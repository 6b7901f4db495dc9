#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace motionauth {

// SplitMix64. Used everywhere instead of <random> so that streams are
// reproducible independent of the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  // standard normal via Box-Muller
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = std::size_t(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// FNV-1a, used for deriving substream seeds and content digests.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = fnv1a(&seed, sizeof(seed));
  return fnv1a(tag.data(), tag.size(), h);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  std::uint64_t h = fnv1a(&seed, sizeof(seed));
  return fnv1a(&v, sizeof(v), h);
}

}  // namespace motionauth
