#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "kansa/point.hpp"

namespace kansa {

/// Interior and boundary points of one set (trial or test).
template <int D>
struct PointSets {
  std::vector<Point<D>> interior;
  std::vector<Point<D>> boundary;

  std::size_t size() const { return interior.size() + boundary.size(); }

  /// Interior points first, boundary points after; this order fixes the
  /// column order of assembled systems.
  std::vector<Point<D>> all() const {
    std::vector<Point<D>> out = interior;
    out.insert(out.end(), boundary.begin(), boundary.end());
    return out;
  }
};

struct GeometryOptions {
  int fill_samples_per_axis = 2001;  // interior fill-distance sampling grid
  int edge_samples = 4001;           // per-edge samples for the boundary charts
  bool compute_measured = true;      // skip the density measurements if false
};

/// Point sets and scattered-data density measures for one refinement level on
/// the unit square.
struct LevelGeometry {
  int level_index = 0;
  PointSets<2> trial;
  PointSets<2> test;
  double nominal_h = 0.0;   // 2^{-j}; drives every schedule
  double measured_h = 0.0;  // max of interior and per-edge boundary fill distances
  double measured_q = 0.0;  // min of interior and per-edge boundary separations
};

namespace detail {

/// Uniform-bucket grid for nearest-point queries over 2-D points. The lookup
/// expands over bucket rings; after finishing ring r around the query cell,
/// any point in a farther ring is at least r*cell away, so the scan stops as
/// soon as the best distance found is within that bound.
class NearestNeighborGrid {
 public:
  NearestNeighborGrid(const std::vector<Point<2>>& points, Point<2> lo, Point<2> hi)
      : points_(points), lo_(lo) {
    const double extent = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-12});
    const int target = static_cast<int>(std::sqrt(static_cast<double>(points.size()))) + 1;
    cells_ = std::clamp(target, 1, 512);
    cell_ = extent / cells_;
    buckets_.assign(static_cast<std::size_t>(cells_) * cells_, {});
    for (std::size_t i = 0; i < points.size(); ++i) {
      buckets_[static_cast<std::size_t>(cell_index(points[i][1])) * cells_ +
               cell_index(points[i][0])]
          .push_back(i);
    }
  }

  double min_distance(const Point<2>& q) const {
    const int cx = cell_index(q[0]);
    const int cy = cell_index(q[1]);
    double best_sq = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring <= cells_; ++ring) {
      if (best_sq < std::numeric_limits<double>::infinity()) {
        const double bound = (ring - 1.0) * cell_;
        if (bound > 0.0 && best_sq <= bound * bound) break;
      }
      for (int dy = -ring; dy <= ring; ++dy) {
        const int y = cy + dy;
        if (y < 0 || y >= cells_) continue;
        const bool edge_row = (dy == -ring || dy == ring);
        for (int dx = -ring; dx <= ring; dx += edge_row ? 1 : std::max(2 * ring, 1)) {
          const int x = cx + dx;
          if (x < 0 || x >= cells_) continue;
          for (std::size_t idx : buckets_[static_cast<std::size_t>(y) * cells_ + x])
            best_sq = std::min(best_sq, squared_distance<2>(q, points_[idx]));
        }
      }
    }
    return std::sqrt(best_sq);
  }

 private:
  int cell_index(double v) const {
    return std::clamp(static_cast<int>((v - lo_[0]) / cell_), 0, cells_ - 1);
  }

  const std::vector<Point<2>>& points_;
  Point<2> lo_;
  int cells_ = 1;
  double cell_ = 1.0;
  std::vector<std::vector<std::size_t>> buckets_;
};

inline void extend_bbox(Point<2>& lo, Point<2>& hi, const std::vector<Point<2>>& pts) {
  for (const auto& p : pts) {
    lo[0] = std::min(lo[0], p[0]);
    lo[1] = std::min(lo[1], p[1]);
    hi[0] = std::max(hi[0], p[0]);
    hi[1] = std::max(hi[1], p[1]);
  }
}

}  // namespace detail

/// Largest distance from any sample to its nearest point: a sampled lower
/// bound of the fill distance sup_{y in region} min_j ||y - y_j|| that
/// converges as the sampling refines.
inline double fill_distance(const std::vector<Point<2>>& points,
                            const std::vector<Point<2>>& region_samples) {
  if (points.empty()) throw std::invalid_argument("fill_distance: empty point set");
  if (region_samples.empty()) throw std::invalid_argument("fill_distance: empty sample set");
  const double inf = std::numeric_limits<double>::infinity();
  Point<2> lo{inf, inf}, hi{-inf, -inf};
  detail::extend_bbox(lo, hi, points);
  detail::extend_bbox(lo, hi, region_samples);
  detail::NearestNeighborGrid grid(points, lo, hi);
  double worst = 0.0;
  for (const auto& s : region_samples) worst = std::max(worst, grid.min_distance(s));
  return worst;
}

/// Half the minimum pairwise distance. A duplicated point yields 0, which
/// callers must treat as degenerate.
inline double separation_distance(const std::vector<Point<2>>& points) {
  if (points.size() < 2) throw std::invalid_argument("separation_distance: need at least 2 points");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      best = std::min(best, squared_distance<2>(points[i], points[j]));
  return 0.5 * std::sqrt(best);
}

inline std::vector<Point<2>> unit_square_grid_samples(int per_axis) {
  if (per_axis < 2) throw std::invalid_argument("unit_square_grid_samples: need >= 2 per axis");
  std::vector<Point<2>> out;
  out.reserve(static_cast<std::size_t>(per_axis) * per_axis);
  for (int iy = 0; iy < per_axis; ++iy)
    for (int ix = 0; ix < per_axis; ++ix)
      out.push_back({ix / double(per_axis - 1), iy / double(per_axis - 1)});
  return out;
}

namespace detail {

/// Arclength parameters of the boundary points on each of the four edges of
/// the unit square. Corners belong to both adjacent edges, matching the
/// per-chart definition of the boundary density measures.
inline std::array<std::vector<double>, 4> edge_charts(const std::vector<Point<2>>& boundary) {
  std::array<std::vector<double>, 4> charts;  // bottom, right, top, left
  constexpr double tol = 1e-12;
  for (const auto& p : boundary) {
    if (std::abs(p[1]) < tol) charts[0].push_back(p[0]);
    if (std::abs(p[0] - 1.0) < tol) charts[1].push_back(p[1]);
    if (std::abs(p[1] - 1.0) < tol) charts[2].push_back(p[0]);
    if (std::abs(p[0]) < tol) charts[3].push_back(p[1]);
  }
  return charts;
}

inline double fill_distance_1d(const std::vector<double>& ts, int samples) {
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double s = k / double(samples - 1);
    double best = std::numeric_limits<double>::infinity();
    for (double t : ts) best = std::min(best, std::abs(s - t));
    worst = std::max(worst, best);
  }
  return worst;
}

inline double separation_1d(const std::vector<double>& ts) {
  std::vector<double> sorted = ts;
  std::sort(sorted.begin(), sorted.end());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sorted.size(); ++i)
    best = std::min(best, sorted[i] - sorted[i - 1]);
  return 0.5 * best;
}

inline PointSets<2> make_trial_sets(int j) {
  PointSets<2> sets;
  const int m = (1 << j) + 1;  // sqrt(N) interior points per axis
  sets.interior.reserve(static_cast<std::size_t>(m) * m);
  for (int iy = 1; iy <= m; ++iy)
    for (int ix = 1; ix <= m; ++ix)
      sets.interior.push_back({ix / double(m + 1), iy / double(m + 1)});

  // 4(sqrt(N) - 1) boundary points, equal perimeter spacing 1/(sqrt(N)-1),
  // walking counterclockwise from the origin with corners included once.
  const int per_edge = 1 << j;
  const double sp = 1.0 / per_edge;
  sets.boundary.reserve(static_cast<std::size_t>(4) * per_edge);
  for (int k = 0; k < per_edge; ++k) sets.boundary.push_back({k * sp, 0.0});
  for (int k = 0; k < per_edge; ++k) sets.boundary.push_back({1.0, k * sp});
  for (int k = 0; k < per_edge; ++k) sets.boundary.push_back({1.0 - k * sp, 1.0});
  for (int k = 0; k < per_edge; ++k) sets.boundary.push_back({0.0, 1.0 - k * sp});
  return sets;
}

}  // namespace detail

/// Level-j point sets on the unit square. Interior trial points form the
/// m x m grid at coordinates i/(m+1) with m = 2^j + 1, so the interior counts
/// are N = 9, 25, 81, 289 for j = 1..4. Test sets are the trial sets of level
/// j + 1, which keeps the testing side strictly finer than the trial side.
inline LevelGeometry build_level(int j, const GeometryOptions& opts = {}) {
  if (j < 1) throw std::invalid_argument("build_level: level index must be >= 1");
  LevelGeometry geom;
  geom.level_index = j;
  geom.trial = detail::make_trial_sets(j);
  geom.test = detail::make_trial_sets(j + 1);
  geom.nominal_h = std::pow(2.0, -j);

  if (opts.compute_measured) {
    const auto samples = unit_square_grid_samples(opts.fill_samples_per_axis);
    const double h_interior = fill_distance(geom.trial.interior, samples);
    const double q_interior = separation_distance(geom.trial.interior);

    const auto charts = detail::edge_charts(geom.trial.boundary);
    double h_boundary = 0.0;
    double q_boundary = std::numeric_limits<double>::infinity();
    for (const auto& chart : charts) {
      if (chart.empty()) throw std::runtime_error("build_level: empty boundary chart");
      h_boundary = std::max(h_boundary, detail::fill_distance_1d(chart, opts.edge_samples));
      if (chart.size() >= 2) q_boundary = std::min(q_boundary, detail::separation_1d(chart));
    }
    geom.measured_h = std::max(h_interior, h_boundary);
    geom.measured_q = std::min(q_interior, q_boundary);
  }
  return geom;
}

}  // namespace kansa
