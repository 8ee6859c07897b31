#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "rrnum/error_model.hpp"
#include "rrnum/errors.hpp"
#include "rrnum/utility.hpp"

namespace rrnum {

struct ExponentBounds {
  double min_abs_first;   // inf |E0'| on [0, 1]
  double max_abs_second;  // sup |E0''| on [0, 1]
};

// Sampled bounds of the error exponent's derivatives on [0, 1].
inline ExponentBounds exponent_bounds(const ErrorModel& model, std::size_t samples = 1001) {
  ExponentBounds b{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = static_cast<double>(i) / static_cast<double>(samples - 1);
    b.min_abs_first = std::min(b.min_abs_first, std::abs(model.exponent_first(r)));
    b.max_abs_second = std::max(b.max_abs_second, std::abs(model.exponent_second(r)));
  }
  return b;
}

struct ConvexityScan {
  bool convex = true;
  double min_second_difference = std::numeric_limits<double>::infinity();
  double worst_rate = 0.0;
};

// Central second differences of E at the midpoints of `points` equal cells of
// [0, 1]. The step is scaled to the exponent's curvature so the difference
// stays well above rounding.
inline ConvexityScan scan_convexity(const ErrorModel& model, std::size_t points = 1000) {
  ConvexityScan scan;
  const double cell = 1.0 / static_cast<double>(points);
  const double h = std::min(0.25 * cell, 1e-2 / model.block_length());
  for (std::size_t i = 0; i < points; ++i) {
    const double r = (static_cast<double>(i) + 0.5) * cell;
    const double e0 = model.value(r);
    const double dd = (model.value(r + h) - 2.0 * e0 + model.value(r - h)) / (h * h);
    // Normalize by E(r) so the verdict is scale free across the many decades E spans.
    const double rel = dd / e0;
    if (rel < scan.min_second_difference) {
      scan.min_second_difference = rel;
      scan.worst_rate = r;
    }
    if (!(dd > 0.0)) scan.convex = false;
  }
  return scan;
}

struct Lemma1Report {
  bool holds_for_n = false;  // N > eps2 / eps1^2
  double minimum_n = 0.0;    // eps2 / eps1^2
  bool grid_convex = false;  // E'' > 0 at every grid point (finite differences)
  ConvexityScan scan;
};

// Sufficient block length for convexity of E = exp(-N E0), given |E0'| >= eps1
// and |E0''| <= eps2, together with a direct numerical convexity scan.
inline Lemma1Report check_lemma1(const ErrorModel& model, double eps1, double eps2,
                                 std::size_t grid_points = 1000) {
  if (!(eps1 > 0.0)) throw DomainError("eps1 must be positive");
  if (!(eps2 >= 0.0)) throw DomainError("eps2 must be non-negative");
  Lemma1Report report;
  report.minimum_n = eps2 / (eps1 * eps1);
  report.holds_for_n = model.block_length() > report.minimum_n;
  report.scan = scan_convexity(model, grid_points);
  report.grid_convex = report.scan.convex;
  return report;
}

// Lemma 1 with eps1, eps2 taken from the sampled exponent derivatives.
inline Lemma1Report check_lemma1(const ErrorModel& model, std::size_t grid_points = 1000) {
  const auto b = exponent_bounds(model);
  if (!(b.min_abs_first > 0.0)) {
    Lemma1Report r;
    r.minimum_n = std::numeric_limits<double>::infinity();
    r.scan = scan_convexity(model, grid_points);
    r.grid_convex = r.scan.convex;
    return r;
  }
  return check_lemma1(model, b.min_abs_first, b.max_abs_second, grid_points);
}

struct Lemma2Report {
  bool holds = true;
  double worst_g = -std::numeric_limits<double>::infinity();
  double worst_x = 0.0;
};

// g(x) = U''(x) x + U'(x) <= 0 on the supplied rate grid. Values within 1e-12
// of |U'(x)| count as zero (the alpha = 1 case is identically zero).
inline Lemma2Report check_lemma2(const Utility& u, std::span<const double> grid) {
  Lemma2Report report;
  for (double x : grid) {
    const double g = u.elasticity_margin(x);
    if (g > report.worst_g) {
      report.worst_g = g;
      report.worst_x = x;
    }
    if (g > 1e-12 * std::abs(u.rate_first(x))) report.holds = false;
  }
  return report;
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    grid[i] = lo + t * (hi - lo);
  }
  if (points > 1) grid.back() = hi;
  return grid;
}

inline Lemma2Report check_lemma2(const Utility& u, std::size_t points = 1000) {
  const auto grid = linear_grid(u.params().x_min, u.params().x_max, points);
  return check_lemma2(u, grid);
}

}  // namespace rrnum
