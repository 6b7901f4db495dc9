#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>

#include "motionauth/errors.hpp"

namespace motionauth {

// Row-major throughout: serialized payloads and reshapes are defined on
// row-major element order, so keeping storage row-major makes reshape a
// reinterpretation instead of a copy.
template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using MatF = Mat<float>;
using MatD = Mat<double>;

template <typename S>
std::string shape_str(const Mat<S>& m) {
  std::ostringstream os;
  os << "(" << m.rows() << " x " << m.cols() << ")";
  return os.str();
}

template <typename S>
void require_same_shape(const Mat<S>& a, const Mat<S>& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) +
                     " vs " + shape_str(b));
  }
}

template <typename S>
bool all_finite(const Mat<S>& m) {
  return m.allFinite();
}

template <typename S>
Mat<S> cast_mat(const MatD& m) {
  return m.template cast<S>();
}

inline MatF to_float(const MatD& m) { return m.cast<float>(); }
inline MatD to_double(const MatF& m) { return m.cast<double>(); }

}  // namespace motionauth
