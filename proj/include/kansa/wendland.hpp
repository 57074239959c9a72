#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "kansa/point.hpp"

namespace kansa {

/// Smoothness of the compactly supported Wendland radial function
/// (the d<=3 family, normalized so that phi(0)=1).
enum class Smoothness { C2, C4, C6 };

inline const char* smoothness_tag(Smoothness s) {
  switch (s) {
    case Smoothness::C2: return "wendland-c2";
    case Smoothness::C4: return "wendland-c4";
    case Smoothness::C6: return "wendland-c6";
  }
  return "unknown";
}

/// Radial value and first two radial derivatives at one radius.
struct RadialDerivatives {
  double value;
  double first;
  double second;
};

/// Unscaled Wendland radial function with unit support radius.
///
/// The C6 member is phi(r) = (1-r)_+^8 (32 r^3 + 25 r^2 + 8 r + 1), which for
/// d = 2 generates the Sobolev space of order sigma = 4.5. The closed-form
/// derivatives below factor out (1-r)^k explicitly so that value and both
/// derivatives vanish identically at r >= 1:
///   C6:  phi'  = -22 r (16 r^2 + 7 r + 1)(1-r)^7
///        phi'' =  22 (160 r^3 + 15 r^2 - 6 r - 1)(1-r)^6
///   C4:  phi   = (1-r)^6 (35 r^2 + 18 r + 3) / 3
///        phi'  = -56/3 r (5 r + 1)(1-r)^5
///        phi'' =  56/3 (35 r^2 - 4 r - 1)(1-r)^4
///   C2:  phi   = (1-r)^4 (4 r + 1)
///        phi'  = -20 r (1-r)^3
///        phi'' = -20 (1 - 4 r)(1-r)^2
struct WendlandKernel {
  int dimension = 2;
  Smoothness smoothness = Smoothness::C6;

  /// Sobolev order of the space the kernel generates: k + (d+1)/2 with
  /// k = 1, 2, 3 for C2, C4, C6.
  double sobolev_order() const {
    const int k = smoothness == Smoothness::C2 ? 1 : smoothness == Smoothness::C4 ? 2 : 3;
    return k + 0.5 * (dimension + 1);
  }
};

namespace detail {

template <int P>
inline double int_pow(double x) {
  double r = 1.0;
  for (int i = 0; i < P; ++i) r *= x;
  return r;
}

}  // namespace detail

inline double radial_value(const WendlandKernel& kernel, double r) {
  if (r < 0.0) throw std::invalid_argument("radial_value: negative radius");
  if (r >= 1.0) return 0.0;
  const double m = 1.0 - r;
  switch (kernel.smoothness) {
    case Smoothness::C2:
      return detail::int_pow<4>(m) * (4.0 * r + 1.0);
    case Smoothness::C4:
      return detail::int_pow<6>(m) * ((35.0 * r + 18.0) * r + 3.0) / 3.0;
    case Smoothness::C6:
      return detail::int_pow<8>(m) * (((32.0 * r + 25.0) * r + 8.0) * r + 1.0);
  }
  return 0.0;
}

inline RadialDerivatives radial_derivatives(const WendlandKernel& kernel, double r) {
  if (r < 0.0) throw std::invalid_argument("radial_derivatives: negative radius");
  if (r >= 1.0) return {0.0, 0.0, 0.0};
  const double m = 1.0 - r;
  switch (kernel.smoothness) {
    case Smoothness::C2:
      return {detail::int_pow<4>(m) * (4.0 * r + 1.0),
              -20.0 * r * detail::int_pow<3>(m),
              -20.0 * (1.0 - 4.0 * r) * detail::int_pow<2>(m)};
    case Smoothness::C4:
      return {detail::int_pow<6>(m) * ((35.0 * r + 18.0) * r + 3.0) / 3.0,
              -56.0 / 3.0 * r * (5.0 * r + 1.0) * detail::int_pow<5>(m),
              56.0 / 3.0 * ((35.0 * r - 4.0) * r - 1.0) * detail::int_pow<4>(m)};
    case Smoothness::C6:
      return {detail::int_pow<8>(m) * (((32.0 * r + 25.0) * r + 8.0) * r + 1.0),
              -22.0 * r * ((16.0 * r + 7.0) * r + 1.0) * detail::int_pow<7>(m),
              22.0 * (((160.0 * r + 15.0) * r - 6.0) * r - 1.0) * detail::int_pow<6>(m)};
  }
  return {0.0, 0.0, 0.0};
}

/// phi'(r)/r with the analytic limit phi''(0) at the origin. The quotient is
/// smooth; the explicit limit avoids 0/0 on Gram diagonals.
inline double radial_first_over_r(const WendlandKernel& kernel, double r) {
  if (r < 1e-12) return radial_derivatives(kernel, 0.0).second;
  return radial_derivatives(kernel, r).first / r;
}

/// The basis generator: Phi_delta(x, y) = delta^{-d} phi(||x - y|| / delta).
/// Support radius is delta. delta > 1 is permitted; the benchmark runs use
/// delta = 2.0 and delta_1 = 2.4 even though the scaling analysis assumes
/// delta in (0, 1].
template <int D>
struct ScaledKernel {
  WendlandKernel base;
  double delta = 1.0;

  ScaledKernel() { base.dimension = D; }
  ScaledKernel(WendlandKernel k, double scale) : base(k), delta(scale) {
    if (!(delta > 0.0)) throw std::invalid_argument("ScaledKernel: delta must be positive");
    if (base.dimension != D) throw std::invalid_argument("ScaledKernel: dimension mismatch");
  }

  double normalization() const {
    double s = 1.0;
    for (int i = 0; i < D; ++i) s /= delta;
    return s;
  }
};

template <int D>
inline double scaled_value(const ScaledKernel<D>& k, const Point<D>& x, const Point<D>& y) {
  const double r = distance<D>(x, y) / k.delta;
  if (r >= 1.0) return 0.0;
  return k.normalization() * radial_value(k.base, r);
}

}  // namespace kansa
