#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace kansa {

/// A point in R^D. Plain aggregate; all geometry helpers are free functions.
template <int D>
using Point = std::array<double, D>;

template <int D>
inline double squared_distance(const Point<D>& a, const Point<D>& b) {
  double s = 0.0;
  for (int i = 0; i < D; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

template <int D>
inline double distance(const Point<D>& a, const Point<D>& b) {
  return std::sqrt(squared_distance<D>(a, b));
}

template <int D>
inline bool all_finite(const Point<D>& p) {
  for (int i = 0; i < D; ++i) {
    if (!std::isfinite(p[i])) return false;
  }
  return true;
}

}  // namespace kansa
