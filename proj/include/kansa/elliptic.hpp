#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "kansa/point.hpp"
#include "kansa/wendland.hpp"

namespace kansa {

template <int D>
using ScalarField = std::function<double(const Point<D>&)>;

/// Second-order operator L u = sum_ij a_ij d2u/dxi dxj + sum_i b_i du/dxi + c u,
/// strictly elliptic on the domain. Coefficients are caller-supplied callables
/// of a point and must be pure functions.
template <int D>
struct EllipticOperator {
  std::array<std::array<ScalarField<D>, D>, D> a;
  std::array<ScalarField<D>, D> b;
  ScalarField<D> c;
};

/// Coefficient values of an EllipticOperator frozen at one point. Assembly
/// evaluates coefficients once per row and reuses them across all columns.
template <int D>
struct OperatorCoefficients {
  std::array<std::array<double, D>, D> a;
  std::array<double, D> b;
  double c;
};

template <int D>
inline OperatorCoefficients<D> evaluate_coefficients(const EllipticOperator<D>& op,
                                                     const Point<D>& x) {
  OperatorCoefficients<D> out{};
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      if (!op.a[i][j]) throw std::invalid_argument("EllipticOperator: missing a coefficient");
      out.a[i][j] = op.a[i][j](x);
    }
  for (int i = 0; i < D; ++i) {
    if (!op.b[i]) throw std::invalid_argument("EllipticOperator: missing b coefficient");
    out.b[i] = op.b[i](x);
  }
  if (!op.c) throw std::invalid_argument("EllipticOperator: missing c coefficient");
  out.c = op.c(x);
  return out;
}

/// Smallest eigenvalue of the symmetric part of [a_ij]; must be positive for
/// strict ellipticity.
template <int D>
inline double min_ellipticity_eigenvalue(const OperatorCoefficients<D>& coeffs) {
  Eigen::Matrix<double, D, D> sym;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) sym(i, j) = 0.5 * (coeffs.a[i][j] + coeffs.a[j][i]);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, D, D>> es(sym);
  return es.eigenvalues().minCoeff();
}

/// (L_x Phi_delta(. - y))(x) for frozen coefficients at x.
///
/// With s = ||x - y||/delta and unit direction u = (x - y)/||x - y||, the
/// radial chain rule gives
///   grad Phi_delta = delta^{-d-1} phi'(s) u,
///   hess Phi_delta = delta^{-d-2} [ (phi''(s) - phi'(s)/s) u u^T + (phi'(s)/s) I ],
/// with the s -> 0 limit hess = delta^{-d-2} phi''(0) I and grad = 0.
template <int D>
inline double operator_image(const ScaledKernel<D>& k, const OperatorCoefficients<D>& coeffs,
                             const Point<D>& x, const Point<D>& y) {
  const double dist = distance<D>(x, y);
  const double s = dist / k.delta;
  if (s >= 1.0) return 0.0;

  const double norm = k.normalization();
  const double inv_d1 = norm / k.delta;
  const double inv_d2 = inv_d1 / k.delta;

  const RadialDerivatives der = radial_derivatives(k.base, s);
  const double g1 = radial_first_over_r(k.base, s);  // phi'(s)/s, limit phi''(0)

  double out = 0.0;
  if (s < 1e-12) {
    // Coincident points: hessian is a multiple of the identity.
    for (int i = 0; i < D; ++i) out += coeffs.a[i][i];
    out *= inv_d2 * der.second;
  } else {
    std::array<double, D> u;
    for (int i = 0; i < D; ++i) u[i] = (x[i] - y[i]) / dist;
    const double aniso = der.second - g1;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        const double hess = inv_d2 * (aniso * u[i] * u[j] + (i == j ? g1 : 0.0));
        out += coeffs.a[i][j] * hess;
      }
    for (int i = 0; i < D; ++i) out += coeffs.b[i] * inv_d1 * der.first * u[i];
  }
  out += coeffs.c * norm * der.value;
  return out;
}

template <int D>
inline double apply_operator(const ScaledKernel<D>& k, const EllipticOperator<D>& op,
                             const Point<D>& x, const Point<D>& y) {
  return operator_image<D>(k, evaluate_coefficients<D>(op, x), x, y);
}

/// a = identity, b = 0, c = 0.
template <int D>
inline EllipticOperator<D> laplacian_operator() {
  EllipticOperator<D> op;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j)
      op.a[i][j] = [v = (i == j) ? 1.0 : 0.0](const Point<D>&) { return v; };
  for (int i = 0; i < D; ++i) op.b[i] = [](const Point<D>&) { return 0.0; };
  op.c = [](const Point<D>&) { return 0.0; };
  return op;
}

/// Dirichlet problem L u = f in the domain, u = g on the boundary, with an
/// optional exact solution for error reporting.
template <int D>
struct EllipticBVP {
  EllipticOperator<D> op;
  ScalarField<D> f;
  ScalarField<D> g;
  std::optional<ScalarField<D>> exact;
};

}  // namespace kansa
