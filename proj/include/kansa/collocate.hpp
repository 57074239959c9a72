#pragma once

#include <chrono>
#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "kansa/geometry.hpp"
#include "kansa/linalg.hpp"
#include "kansa/metrics.hpp"
#include "kansa/problem.hpp"

namespace kansa {

/// One collocation solution s(x) = sum_j c_j Phi_delta(x - y_j).
template <int D>
struct LevelSolution {
  ScaledKernel<D> kernel;
  std::vector<Point<D>> centers;  // interior trial centers first, then boundary
  Eigen::VectorXd coefficients;
  SolveOutcome diagnostics;
  int level_index = 0;
  long interior_center_count = 0;

  double value_at(const Point<D>& x) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      const double v = scaled_value<D>(kernel, x, centers[j]);
      if (v != 0.0) acc += coefficients(static_cast<long>(j)) * v;
    }
    return acc;
  }

  /// (L s)(x) for frozen operator coefficients at x.
  double operator_image_at(const OperatorCoefficients<D>& coeffs, const Point<D>& x) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j)
      acc += coefficients(static_cast<long>(j)) * operator_image<D>(kernel, coeffs, x, centers[j]);
    return acc;
  }
};

template <int D>
std::vector<double> evaluate(const LevelSolution<D>& sol, std::span<const Point<D>> points,
                             int threads = 1) {
  std::vector<double> out(points.size());
  parallel_for_chunks(
      static_cast<long>(points.size()), 256,
      [&](long begin, long end) {
        for (long i = begin; i < end; ++i) out[static_cast<std::size_t>(i)] = sol.value_at(points[i]);
      },
      threads);
  return out;
}

template <int D>
std::vector<double> evaluate_operator_image(const LevelSolution<D>& sol,
                                            const EllipticOperator<D>& op,
                                            std::span<const Point<D>> points, int threads = 1) {
  std::vector<double> out(points.size());
  parallel_for_chunks(
      static_cast<long>(points.size()), 256,
      [&](long begin, long end) {
        for (long i = begin; i < end; ++i) {
          const auto coeffs = evaluate_coefficients<D>(op, points[i]);
          out[static_cast<std::size_t>(i)] = sol.operator_image_at(coeffs, points[i]);
        }
      },
      threads);
  return out;
}

struct SolveOptions {
  long cg_max_iter = 200000;
  int threads = 1;
  GeometryOptions geometry{2001, 4001, false};  // measured distances are not needed to solve
};

namespace detail {

/// Shared one-level kernel of both drivers: assemble against the given
/// right-hand sides and solve. The residual scale pins the CG stopping rule
/// to the original data size, which makes multilevel level 1 identical to a
/// plain one-level solve.
inline LevelSolution<2> solve_level_with_rhs(const LevelGeometry& geom, double delta,
                                             const EllipticBVP<2>& bvp,
                                             const ScalarField<2>& rhs_interior,
                                             const ScalarField<2>& rhs_boundary, double cg_tol,
                                             double residual_scale, const SolveOptions& opts) {
  WendlandKernel base;
  base.dimension = 2;
  base.smoothness = Smoothness::C6;
  const ScaledKernel<2> kernel(base, delta);

  const auto system = assemble<2>(geom.trial, geom.test, kernel, bvp, rhs_interior, rhs_boundary,
                                  opts.threads);
  CgOptions cg;
  cg.tol = cg_tol;
  cg.max_iter = opts.cg_max_iter;
  cg.residual_scale = residual_scale;
  auto outcome = cg_normal_solve<2>(system, cg);

  LevelSolution<2> sol;
  sol.kernel = kernel;
  sol.centers = system.column_centers;
  sol.coefficients = outcome.coefficients;
  sol.diagnostics = std::move(outcome);
  sol.level_index = geom.level_index;
  sol.interior_center_count = static_cast<long>(geom.trial.interior.size());
  return sol;
}

}  // namespace detail

/// One-level unsymmetric collocation at level j: trial sets from build_level,
/// test sets one level finer, CG on the normal equations at the supplied
/// stopping tolerance (a relative collocation residual). Non-converged CG is
/// returned flagged in the diagnostics, never hidden.
inline LevelSolution<2> solve_one_level(int j, double delta, const EllipticBVP<2>& bvp,
                                        double cg_tol, const SolveOptions& opts = {}) {
  if (!(delta > 0.0)) throw std::invalid_argument("solve_one_level: delta must be positive");
  if (!(cg_tol > 0.0)) throw std::invalid_argument("solve_one_level: cg_tol must be positive");
  const LevelGeometry geom = build_level(j, opts.geometry);
  return detail::solve_level_with_rhs(geom, delta, bvp, bvp.f, bvp.g, cg_tol, 0.0, opts);
}

struct StudyOptions {
  int eval_grid = 1000;  // 0 skips error evaluation
  long cg_max_iter = 200000;
  int threads = 1;
};

struct OneLevelStudy {
  ConvergenceReport report;
  std::vector<LevelSolution<2>> solutions;
  bool all_converged = true;
};

/// The fixed-delta benchmark study: independent one-level solves at levels
/// 1..k with the CG stopping level 0.75 h^2 per level; the report's Tolerance
/// column carries the printed schedule h^2.4.
inline OneLevelStudy run_one_level_study(int levels, double delta, const EllipticBVP<2>& bvp,
                                         const StudyOptions& opts = {}) {
  if (levels < 1) throw std::invalid_argument("run_one_level_study: need levels >= 1");
  OneLevelStudy study;
  WendlandKernel base;
  study.report.kernel_tag = smoothness_tag(base.smoothness);
  study.report.sigma = base.sobolev_order();
  study.report.dim = 2;
  study.report.schedule_desc = "fixed delta";
  study.report.eval_grid = opts.eval_grid;

  SolveOptions solve_opts;
  solve_opts.cg_max_iter = opts.cg_max_iter;
  solve_opts.threads = opts.threads;

  double prev_error = std::numeric_limits<double>::quiet_NaN();
  for (int j = 1; j <= levels; ++j) {
    const double h = std::pow(2.0, -j);
    const auto t0 = std::chrono::steady_clock::now();
    auto sol = solve_one_level(j, delta, bvp, cg_stopping_tolerance(h), solve_opts);

    ReportRow row;
    row.level = j;
    row.delta = delta;
    row.n_interior = sol.interior_center_count;
    row.tolerance = cg_tolerance_schedule(h, study.report.sigma, 2);
    row.cg_iterations = sol.diagnostics.iterations;
    study.all_converged = study.all_converged && sol.diagnostics.converged;

    if (bvp.exact && opts.eval_grid >= 2) {
      const auto& exact = *bvp.exact;
      row.l2_error = l2_error_on_grid([&](const Point<2>& p) { return sol.value_at(p); }, exact,
                                      opts.eval_grid, opts.threads);
      if (j > 1 && std::isfinite(prev_error))
        row.order = observed_order(prev_error, row.l2_error, std::pow(2.0, -(j - 1)), h);
      prev_error = row.l2_error;
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    study.report.rows.push_back(row);
    study.solutions.push_back(std::move(sol));
  }
  return study;
}

/// CSV export of a solution: one "x,y,coefficient" row per center.
template <int D>
void write_solution_csv(const LevelSolution<D>& sol, std::ostream& os) {
  os << "x,y,coefficient\n";
  char buf[96];
  for (std::size_t j = 0; j < sol.centers.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", sol.centers[j][0], sol.centers[j][1],
                  sol.coefficients(static_cast<long>(j)));
    os << buf;
  }
}

}  // namespace kansa
