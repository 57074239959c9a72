#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "kansa/elliptic.hpp"

namespace kansa {

/// Poisson benchmark on the unit square:
///   laplace u = -(5/4) pi^2 sin(pi x) cos(pi y / 2)   in (0,1)^2
///   u = sin(pi x) on the edge y = 0, u = 0 on the rest of the boundary,
/// exact solution u(x, y) = sin(pi x) cos(pi y / 2).
///
/// Boundary corners evaluate identically under either edge assignment since
/// sin(0) = sin(pi) = 0.
inline EllipticBVP<2> poisson_benchmark() {
  using std::numbers::pi;
  EllipticBVP<2> bvp;
  bvp.op = laplacian_operator<2>();
  bvp.f = [](const Point<2>& p) {
    return -1.25 * pi * pi * std::sin(pi * p[0]) * std::cos(0.5 * pi * p[1]);
  };
  bvp.g = [](const Point<2>& p) {
    if (std::abs(p[1]) < 1e-14) return std::sin(pi * p[0]);
    return 0.0;
  };
  bvp.exact = [](const Point<2>& p) {
    return std::sin(pi * p[0]) * std::cos(0.5 * pi * p[1]);
  };
  return bvp;
}

inline std::vector<std::string> problem_names() { return {"poisson-square"}; }

inline EllipticBVP<2> problem_by_name(const std::string& name) {
  if (name == "poisson-square") return poisson_benchmark();
  throw std::invalid_argument("unknown problem: " + name);
}

/// Finite-difference image of L applied to a scalar field; used by the
/// consistency self-test below and by tests as an independent oracle.
inline double apply_operator_fd(const EllipticOperator<2>& op, const ScalarField<2>& u,
                                const Point<2>& x, double step = 1e-4) {
  const auto coeffs = evaluate_coefficients<2>(op, x);
  auto shift = [&](double dx, double dy) {
    return u(Point<2>{x[0] + dx, x[1] + dy});
  };
  const double u0 = shift(0, 0);
  const double uxx = (shift(step, 0) - 2 * u0 + shift(-step, 0)) / (step * step);
  const double uyy = (shift(0, step) - 2 * u0 + shift(0, -step)) / (step * step);
  const double uxy = (shift(step, step) - shift(step, -step) - shift(-step, step) +
                      shift(-step, -step)) /
                     (4 * step * step);
  const double ux = (shift(step, 0) - shift(-step, 0)) / (2 * step);
  const double uy = (shift(0, step) - shift(0, -step)) / (2 * step);
  return coeffs.a[0][0] * uxx + (coeffs.a[0][1] + coeffs.a[1][0]) * uxy + coeffs.a[1][1] * uyy +
         coeffs.b[0] * ux + coeffs.b[1] * uy + coeffs.c * u0;
}

/// Spot-check that a problem with a stated exact solution is self-consistent:
/// L(exact) matches f at interior samples (finite differences, so the interior
/// tolerance is FD-limited) and exact matches g on the boundary.
inline void validate_consistency(const EllipticBVP<2>& bvp, double interior_tol = 1e-5,
                                 double boundary_tol = 1e-12) {
  if (!bvp.exact) return;
  const auto& exact = *bvp.exact;
  for (int i = 1; i <= 10; ++i)
    for (int j = 1; j <= 10; ++j) {
      const Point<2> x{i / 11.0, j / 11.0};
      const double lhs = apply_operator_fd(bvp.op, exact, x);
      if (std::abs(lhs - bvp.f(x)) > interior_tol)
        throw std::runtime_error("problem self-test: L(exact) != f at an interior sample");
    }
  for (int k = 0; k < 40; ++k) {
    const double t = 4.0 * k / 40.0;
    Point<2> p;
    if (t < 1.0) p = {t, 0.0};
    else if (t < 2.0) p = {1.0, t - 1.0};
    else if (t < 3.0) p = {3.0 - t, 1.0};
    else p = {0.0, 4.0 - t};
    if (std::abs(exact(p) - bvp.g(p)) > boundary_tol)
      throw std::runtime_error("problem self-test: exact != g at a boundary sample");
  }
}

}  // namespace kansa
