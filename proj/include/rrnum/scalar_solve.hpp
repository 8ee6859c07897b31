#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>

#include "rrnum/errors.hpp"

namespace rrnum {

inline constexpr double kBisectionTolerance = 1e-10;

// Maximize a concave function on [lo, hi] given its (nonincreasing)
// derivative.
struct ScalarConcaveProblem {
  std::function<double(double)> derivative;
  double lo = 0.0;
  double hi = 1.0;
  double tolerance = kBisectionTolerance;
};

namespace detail {

template <class Derivative>
double checked_derivative(Derivative& d, double x) {
  const double v = d(x);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite derivative " << v << " at " << x;
    throw NumericalError(os.str());
  }
  return v;
}

}  // namespace detail

// Returns lo when d(lo) <= 0, hi when d(hi) >= 0, and otherwise the bisection
// root of d to within `tol`. A derivative that vanishes at both ends is zero
// on the whole interval; the midpoint is returned.
template <class Derivative>
double maximize_concave(Derivative&& d, double lo, double hi, double tol = kBisectionTolerance) {
  if (!(lo <= hi)) throw DomainError("empty interval in scalar solve");
  if (lo == hi) return lo;
  const double d_lo = detail::checked_derivative(d, lo);
  const double d_hi = detail::checked_derivative(d, hi);
  if (d_lo <= 0.0 && d_hi >= 0.0) return 0.5 * (lo + hi);
  if (d_lo <= 0.0) return lo;
  if (d_hi >= 0.0) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = detail::checked_derivative(d, mid);
    if (v > 0.0) {
      lo = mid;
    } else if (v < 0.0) {
      hi = mid;
    } else {
      return mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double solve_scalar_concave(const ScalarConcaveProblem& p) {
  if (!p.derivative) throw DomainError("scalar problem has no derivative");
  return maximize_concave(p.derivative, p.lo, p.hi, p.tolerance);
}

// Sampled check that the derivative is nonincreasing (concave objective).
template <class Derivative>
bool derivative_nonincreasing(Derivative&& d, double lo, double hi, std::size_t samples = 200,
                              double slack = 1e-12) {
  double prev = d(lo);
  for (std::size_t i = 1; i < samples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double v = d(x);
    if (v > prev + slack * (1.0 + std::abs(prev))) return false;
    prev = v;
  }
  return true;
}

}  // namespace rrnum
