#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "rrnum/error_model.hpp"
#include "rrnum/errors.hpp"
#include "rrnum/scalar_solve.hpp"
#include "rrnum/utility.hpp"

namespace rrnum {

// log r and log c diverge at zero; the per-source link problem is solved on
// [kCodeRateFloor, 1] and capacity shares are kept above kShareFloorFraction * C.
inline constexpr double kCodeRateFloor = 1e-6;
inline constexpr double kShareFloorFraction = 1e-9;

struct SourceResponse {
  double rate;         // x_s (integrated) or x'_s = log x_s (differentiated)
  double reliability;  // R_s
  double value;        // optimal net utility of the source subproblem
};

struct LinkResponse {
  double code_rate;
  double value;  // lambda r C - mu E(r) at the optimum
};

struct LinkDiffResponse {
  std::vector<double> code_rates;  // r_{l,s}, in the order the prices were given
  std::vector<double> shares;      // c_{l,s}
  double value = 0.0;
};

inline double solve_reliability(const Utility& u, double mu) {
  if (!(mu >= 0.0)) throw DomainError("reliability price must be non-negative");
  return maximize_concave([&](double r) { return u.reliability_first(r) - mu; }, u.params().r_min,
                          1.0);
}

// max U(x, R) - lambda_path x - mu R over [x_min, x_max] x [R_min, 1]; the
// separable utility splits into two scalar solves.
inline SourceResponse solve_source_integrated(const Utility& u, double lambda_path, double mu) {
  if (!(lambda_path >= 0.0)) throw DomainError("congestion price must be non-negative");
  const auto& p = u.params();
  const double x =
      maximize_concave([&](double v) { return u.rate_first(v) - lambda_path; }, p.x_min, p.x_max);
  const double r = solve_reliability(u, mu);
  return {x, r, u.rate_value(x) + u.reliability_value(r) - lambda_path * x - mu * r};
}

// max lambda r C - mu E(r) over r in [rate_floor, 1].
inline LinkResponse solve_link_integrated(const ErrorModel& model, double lambda, double mu_sum,
                                          double capacity, double rate_floor = 0.0) {
  if (!(lambda >= 0.0) || !(mu_sum >= 0.0)) throw DomainError("link prices must be non-negative");
  if (!(rate_floor >= 0.0 && rate_floor <= 1.0)) throw DomainError("code rate floor must lie in [0, 1]");
  // Unpriced link: every code rate is optimal, take the full rate.
  if (lambda == 0.0 && mu_sum == 0.0) return {1.0, 0.0};
  const double r = maximize_concave(
      [&](double v) { return lambda * capacity - mu_sum * model.derivative(v); }, rate_floor, 1.0);
  return {r, lambda * r * capacity - mu_sum * model.value(r)};
}

// max U^x(e^y) + U^R(R) - lambda_path y - mu R over [log x_min, log x_max] x [R_min, 1].
// The rate part is concave in y only when the utility is elastic enough; the
// end points are compared as well so that a permissive run still returns the
// best of the candidates.
inline SourceResponse solve_source_differentiated(const Utility& u, double lambda_path, double mu) {
  if (!(lambda_path >= 0.0)) throw DomainError("congestion price must be non-negative");
  const auto& p = u.params();
  const double lo = std::log(p.x_min);
  const double hi = std::log(p.x_max);
  auto objective = [&](double y) { return u.log_rate_value(y) - lambda_path * y; };
  double y = maximize_concave([&](double v) { return u.log_rate_first(v) - lambda_path; }, lo, hi);
  double best = objective(y);
  for (double cand : {lo, hi}) {
    const double v = objective(cand);
    if (v > best + 1e-14 * (1.0 + std::abs(best))) {
      best = v;
      y = cand;
    }
  }
  const double r = solve_reliability(u, mu);
  return {y, r, best + u.reliability_value(r) - mu * r};
}

// Exact maximizer of sum_s lambda_s log c_s over {c_s >= floor_s, sum c_s <= C}.
// Without floors every share stays above kShareFloorFraction * C. With every
// price zero the capacity left above the floors is split evenly.
inline std::vector<double> proportional_shares(std::span<const double> lambdas, double capacity,
                                               std::span<const double> floors = {}) {
  const std::size_t n = lambdas.size();
  std::vector<double> c(n, 0.0);
  if (n == 0) return c;
  std::vector<double> floor(n, kShareFloorFraction * capacity);
  if (!floors.empty()) {
    if (floors.size() != n) throw StructuralError("share floor vector size mismatch");
    std::copy(floors.begin(), floors.end(), floor.begin());
  }
  const double floor_sum = std::accumulate(floor.begin(), floor.end(), 0.0);
  if (!(floor_sum < capacity)) throw DomainError("share floors exceed the link capacity");
  const double total = std::accumulate(lambdas.begin(), lambdas.end(), 0.0);
  if (!(total > 0.0)) {
    for (std::size_t i = 0; i < n; ++i) c[i] = floor[i] + (capacity - floor_sum) / static_cast<double>(n);
    return c;
  }
  // Sources pinned at the floor; grows until the proportional split of the
  // remaining capacity respects the floor everywhere.
  std::vector<bool> pinned(n, false);
  for (std::size_t i = 0; i < n; ++i) pinned[i] = !(lambdas[i] > 0.0);
  for (;;) {
    double free_price = 0.0;
    double remaining = capacity;
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) remaining -= floor[i]; else free_price += lambdas[i];
    }
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) {
        c[i] = floor[i];
        continue;
      }
      c[i] = remaining * lambdas[i] / free_price;
      if (c[i] < floor[i]) {
        pinned[i] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return c;
}

// Per-pair lower bounds for the differentiated link problem.
struct LinkBounds {
  std::vector<double> code_rate;  // empty: kCodeRateFloor everywhere
  std::vector<double> share;      // empty: kShareFloorFraction * C everywhere
};

// Bounds implied by x_min: x_s <= r c with r <= 1 and c <= C forces
// c_s >= x_min,s and r_s >= x_min,s / C. Falls back to the default floors
// when the minimum rates alone overload the link.
inline LinkBounds implied_link_bounds(std::span<const double> x_min, double capacity) {
  LinkBounds b;
  const double total = std::accumulate(x_min.begin(), x_min.end(), 0.0);
  if (!(total < capacity)) return b;
  for (double v : x_min) {
    b.code_rate.push_back(std::clamp(v / capacity, kCodeRateFloor, 1.0));
    b.share.push_back(std::max(v, kShareFloorFraction * capacity));
  }
  return b;
}

// Link problem of the differentiated policy: the code-rate part separates
// per source, the share part is a proportional allocation of C.
inline LinkDiffResponse solve_link_differentiated(const ErrorModel& model,
                                                  std::span<const double> lambdas,
                                                  std::span<const double> mus, double capacity,
                                                  const LinkBounds& bounds = {}) {
  if (lambdas.size() != mus.size()) throw StructuralError("price vectors differ in length");
  if (lambdas.empty()) throw StructuralError("differentiated link problem without sources");
  if (!bounds.code_rate.empty() && bounds.code_rate.size() != lambdas.size()) {
    throw StructuralError("code rate floor vector size mismatch");
  }
  LinkDiffResponse out;
  out.code_rates.resize(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lam = lambdas[i];
    const double mu = mus[i];
    if (!(lam >= 0.0) || !(mu >= 0.0)) throw DomainError("link prices must be non-negative");
    const double lo = bounds.code_rate.empty() ? kCodeRateFloor : bounds.code_rate[i];
    out.code_rates[i] =
        lam == 0.0 && mu == 0.0
            ? 1.0
            : maximize_concave([&](double r) { return lam / r - mu * model.derivative(r); }, lo, 1.0);
  }
  out.shares = proportional_shares(lambdas, capacity, bounds.share);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double r = out.code_rates[i];
    out.value += lambdas[i] * (std::log(out.shares[i]) + std::log(r)) - mus[i] * model.value(r);
  }
  return out;
}

// Most reliable per-source code rates that carry the offered rates x_s on a
// link: minimize sum_s mu_s E(r_s) subject to sum_s x_s / r_s <= C and
// r_s in (0, 1]. With multiplier nu each r_s solves mu_s E'(r) r^2 = nu x_s;
// nu is found by bisection on its logarithm. Returns r_s = 1 for every
// source when even that overloads the link.
inline std::vector<double> reliable_code_rates(const ErrorModel& model, std::span<const double> x,
                                               std::span<const double> mu, double capacity) {
  const std::size_t n = x.size();
  std::vector<double> r(n, 1.0);
  double full = 0.0;
  for (double v : x) full += v;
  if (!(full < capacity)) return r;
  auto rate_for = [&](std::size_t i, double nu) {
    if (!(mu[i] > 0.0) || !(x[i] > 0.0)) return 1.0;
    const double target = nu * x[i];
    if (mu[i] * model.derivative(1.0) <= target) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double m = 0.5 * (lo + hi);
      if (mu[i] * model.derivative(m) * m * m < target) lo = m; else hi = m;
    }
    return hi;
  };
  auto load_for = [&](double nu, std::vector<double>& out) {
    double load = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = rate_for(i, nu);
      load += x[i] / out[i];
    }
    return load;
  };
  std::vector<double> trial(n);
  double lo = -80.0;
  double hi = 80.0;
  if (load_for(std::exp(hi), trial) > capacity) return r;
  for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
    const double m = 0.5 * (lo + hi);
    if (load_for(std::exp(m), trial) > capacity) lo = m; else hi = m;
  }
  load_for(std::exp(hi), r);
  return r;
}

}  // namespace rrnum
