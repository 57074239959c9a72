#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kansa/elliptic.hpp"
#include "kansa/geometry.hpp"
#include "kansa/parallel.hpp"
#include "kansa/point.hpp"
#include "kansa/wendland.hpp"

namespace kansa {

class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RowKind : std::uint8_t { Interior, Boundary };

/// The nonsquare collocation system: interior rows apply L to the basis
/// functions at interior test points, boundary rows evaluate the basis
/// functions at boundary test points. Oversampled, M > N.
template <int D>
struct CollocationSystem {
  Eigen::MatrixXd matrix;                // M x N
  Eigen::VectorXd rhs;                   // M
  std::vector<RowKind> row_kinds;        // M, interior block first
  std::vector<Point<D>> column_centers;  // N trial centers, interior then boundary
  double delta = 0.0;
  long interior_rows = 0;

  long rows() const { return matrix.rows(); }
  long cols() const { return matrix.cols(); }
};

template <int D>
CollocationSystem<D> assemble(const PointSets<D>& trial, const PointSets<D>& test,
                              const ScaledKernel<D>& kernel, const EllipticBVP<D>& bvp,
                              const ScalarField<D>& rhs_interior,
                              const ScalarField<D>& rhs_boundary, int threads = 1) {
  CollocationSystem<D> sys;
  sys.column_centers = trial.all();
  sys.delta = kernel.delta;
  const long n = static_cast<long>(sys.column_centers.size());
  const long m_int = static_cast<long>(test.interior.size());
  const long m = m_int + static_cast<long>(test.boundary.size());
  if (n == 0 || m == 0) throw std::invalid_argument("assemble: empty trial or test sets");
  if (m <= n)
    throw std::invalid_argument("assemble: oversampling violated, need more test rows than trial centers");

  sys.matrix.resize(m, n);
  sys.rhs.resize(m);
  sys.row_kinds.assign(static_cast<std::size_t>(m), RowKind::Boundary);
  sys.interior_rows = m_int;

  // Coefficients are frozen per row up front; this also runs the strict
  // ellipticity check before any worker thread starts.
  std::vector<OperatorCoefficients<D>> row_coeffs;
  row_coeffs.reserve(static_cast<std::size_t>(m_int));
  for (const Point<D>& x : test.interior) {
    row_coeffs.push_back(evaluate_coefficients<D>(bvp.op, x));
    if (!(min_ellipticity_eigenvalue<D>(row_coeffs.back()) > 0.0))
      throw SingularSystemError("assemble: operator not strictly elliptic at a test point");
  }

  const auto& centers = sys.column_centers;
  parallel_for_chunks(
      m, 32,
      [&](long begin, long end) {
        for (long i = begin; i < end; ++i) {
          if (i < m_int) {
            const Point<D>& x = test.interior[static_cast<std::size_t>(i)];
            const auto& coeffs = row_coeffs[static_cast<std::size_t>(i)];
            sys.row_kinds[static_cast<std::size_t>(i)] = RowKind::Interior;
            for (long jcol = 0; jcol < n; ++jcol)
              sys.matrix(i, jcol) =
                  operator_image<D>(kernel, coeffs, x, centers[static_cast<std::size_t>(jcol)]);
            sys.rhs(i) = rhs_interior(x);
          } else {
            const Point<D>& x = test.boundary[static_cast<std::size_t>(i - m_int)];
            for (long jcol = 0; jcol < n; ++jcol)
              sys.matrix(i, jcol) =
                  scaled_value<D>(kernel, x, centers[static_cast<std::size_t>(jcol)]);
            sys.rhs(i) = rhs_boundary(x);
          }
        }
      },
      threads);

  if (sys.matrix.cwiseAbs().maxCoeff() == 0.0)
    throw SingularSystemError("assemble: kernel support reaches no test point, matrix is zero");
  return sys;
}

enum class CgExit : std::uint8_t {
  Tolerance,      // relative least-squares residual reached tol
  Floor,          // ||A^T r|| negligible against ||A|| ||r||: at the LS optimum
  MaxIterations,  // budget exhausted, flagged non-converged
};

struct CgOptions {
  double tol = 1e-10;
  long max_iter = -1;          // <= 0: 20 * N^2
  double residual_scale = 0;   // <= 0: ||rhs||_2; the norm tol is relative to
  std::function<void(long, double)> observer;  // (iteration, ||b - Ac||_2)
};

struct SolveOutcome {
  Eigen::VectorXd coefficients;
  long iterations = 0;
  double normal_residual = 0.0;           // ||A^T(b - Ac)|| / ||A^T b||, recomputed at exit
  double collocation_residual_inf = 0.0;  // ||b - Ac||_inf
  double ls_residual_rel = 0.0;           // ||b - Ac||_2 / residual scale
  CgExit exit = CgExit::Tolerance;
  bool converged = true;
};

/// Conjugate gradients on the normal equations A^T A c = A^T b from c = 0,
/// in the CGLS recursion (identical iterates, monotone ||b - Ac||_2).
///
/// Stops when ||b - Ac||_2 <= tol * scale, or at the least-squares floor
/// (||A^T r|| <= 1e-12 ||A||_F ||r||, after which no meaningful progress is
/// possible), or at max_iter. The normal-equation residual is recomputed from
/// scratch at exit and reported.
template <int D>
SolveOutcome cg_normal_solve(const CollocationSystem<D>& system, const CgOptions& opts = {}) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("cg_normal_solve: tol must be positive");
  const Eigen::MatrixXd& A = system.matrix;
  const Eigen::VectorXd& b = system.rhs;
  const long n = A.cols();
  const long max_iter = opts.max_iter > 0 ? opts.max_iter : 20 * n * n;
  const double scale = opts.residual_scale > 0 ? opts.residual_scale : b.norm();
  const double frob = A.norm();

  SolveOutcome out;
  out.coefficients = Eigen::VectorXd::Zero(n);

  auto finalize = [&](long iters, CgExit exit) {
    out.iterations = iters;
    out.exit = exit;
    out.converged = exit != CgExit::MaxIterations;
    const Eigen::VectorXd res = b - A * out.coefficients;
    const double ntb = (A.transpose() * b).norm();
    const double ntr = (A.transpose() * res).norm();
    out.normal_residual = ntb > 0 ? ntr / ntb : 0.0;
    out.collocation_residual_inf = res.lpNorm<Eigen::Infinity>();
    out.ls_residual_rel = scale > 0 ? res.norm() / scale : 0.0;
    return out;
  };

  if (scale == 0.0) return finalize(0, CgExit::Tolerance);  // zero data, zero solution

  Eigen::VectorXd r = b;
  Eigen::VectorXd s = A.transpose() * r;
  if (s.norm() == 0.0) return finalize(0, CgExit::Floor);
  Eigen::VectorXd p = s;
  double gamma = s.squaredNorm();

  for (long it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd q = A * p;
    const double qq = q.squaredNorm();
    if (!(qq > 0.0) || !std::isfinite(qq)) return finalize(it, CgExit::Floor);
    const double alpha = gamma / qq;
    out.coefficients += alpha * p;
    r -= alpha * q;
    const double res_norm = r.norm();
    if (opts.observer) opts.observer(it, res_norm);
    if (res_norm <= opts.tol * scale) return finalize(it, CgExit::Tolerance);
    s.noalias() = A.transpose() * r;
    const double gamma_new = s.squaredNorm();
    if (std::sqrt(gamma_new) <= 1e-12 * frob * res_norm) return finalize(it, CgExit::Floor);
    p = s + (gamma_new / gamma) * p;
    gamma = gamma_new;
  }
  return finalize(max_iter, CgExit::MaxIterations);
}

template <int D>
SolveOutcome cg_normal_solve(const CollocationSystem<D>& system, double tol, long max_iter) {
  CgOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return cg_normal_solve(system, opts);
}

/// Dense column-pivoted QR least-squares solve; the verification oracle for
/// cg_normal_solve.
template <int D>
Eigen::VectorXd direct_lsq_solve(const CollocationSystem<D>& system) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(system.matrix);
  qr.setThreshold(1e-14);
  if (qr.rank() < system.matrix.cols())
    throw SingularSystemError("direct_lsq_solve: rank-deficient collocation matrix");
  return qr.solve(system.rhs);
}

struct ResidualNorms {
  double interior_inf = 0.0;
  double boundary_inf = 0.0;
  double combined_inf = 0.0;
};

/// Infinity norms of the interior and boundary blocks of b - Ac.
template <int D>
ResidualNorms residual_inf(const CollocationSystem<D>& system, const Eigen::VectorXd& coefficients) {
  if (coefficients.size() != system.matrix.cols())
    throw std::invalid_argument("residual_inf: coefficient size mismatch");
  const Eigen::VectorXd res = system.rhs - system.matrix * coefficients;
  ResidualNorms norms;
  for (long i = 0; i < res.size(); ++i) {
    const double v = std::abs(res(i));
    if (system.row_kinds[static_cast<std::size_t>(i)] == RowKind::Interior)
      norms.interior_inf = std::max(norms.interior_inf, v);
    else
      norms.boundary_inf = std::max(norms.boundary_inf, v);
  }
  norms.combined_inf = std::max(norms.interior_inf, norms.boundary_inf);
  return norms;
}

/// Text dump for cross-language verification: the matrix row-major, one row
/// per line, entries "%.17g" separated by single spaces; the right-hand side
/// one value per line.
template <int D>
void dump_system(const CollocationSystem<D>& system, std::ostream& matrix_out,
                 std::ostream& rhs_out) {
  char buf[32];
  for (long i = 0; i < system.matrix.rows(); ++i) {
    for (long j = 0; j < system.matrix.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", system.matrix(i, j));
      if (j) matrix_out << ' ';
      matrix_out << buf;
    }
    matrix_out << '\n';
  }
  for (long i = 0; i < system.rhs.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", system.rhs(i));
    rhs_out << buf << '\n';
  }
}

}  // namespace kansa
