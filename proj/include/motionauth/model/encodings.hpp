#pragma once

#include <cmath>

#include "motionauth/mat.hpp"

namespace motionauth {

// Transformer sinusoidal position table:
//   PE(t, 2i)   = sin(t / 10000^(2i/d_model))
//   PE(t, 2i+1) = cos(t / 10000^(2i/d_model))
template <typename S>
Mat<S> positional_encoding(Eigen::Index length, Eigen::Index d_model) {
  Mat<S> pe(length, d_model);
  for (Eigen::Index t = 0; t < length; ++t) {
    for (Eigen::Index i = 0; i < d_model; i += 2) {
      const double rate = std::pow(10000.0, double(i) / double(d_model));
      pe(t, i) = S(std::sin(double(t) / rate));
      if (i + 1 < d_model) pe(t, i + 1) = S(std::cos(double(t) / rate));
    }
  }
  return pe;
}

// Scalar global-time feature, in [-0.5, 0.5) over the series.
inline double temporal_encoding_value(double t, double t_total) {
  return t / t_total - 0.5;
}

// TE column for window positions [start, start+length).
template <typename S>
Mat<S> temporal_encoding(int start, Eigen::Index length, int t_total) {
  Mat<S> te(length, 1);
  for (Eigen::Index j = 0; j < length; ++j)
    te(j, 0) = S(temporal_encoding_value(double(start) + double(j),
                                         double(t_total)));
  return te;
}

}  // namespace motionauth
