#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "rrnum/network.hpp"
#include "rrnum/repair.hpp"
#include "rrnum/result.hpp"
#include "rrnum/schedule.hpp"

namespace rrnum {

struct RunOutput {
  SolveResult result;
  IterationTrace trace;
};

namespace detail {

inline double relative_gap(double dual, double primal) {
  return (dual - primal) / std::max(1.0, std::abs(primal));
}

inline double price_movement(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline bool keep_record(const SolverOptions& opt, std::size_t t) {
  return opt.record_trace && (opt.trace_stride <= 1 || (t - 1) % opt.trace_stride == 0);
}

// Shared driver of both price loops. Each iteration solves every subproblem
// at the current prices, applies the projected price update and repairs the
// primal iterate. The run stops on a small duality gap (smallest dual value
// seen against the best repaired primal value), on small price movement, or
// at the iteration cap, and reports the best repaired iterate together with
// the prices that attain the smallest dual value.
//
// At every check the dual function is also evaluated at the running mean of
// the prices and at their componentwise minimum over the same window. This
// tightens the bound when a constant step leaves the prices oscillating
// around the optimum, in particular around optimal prices at zero.
template <class Prices, class Snapshot, class Solve, class Dual, class Update, class Repair,
          class Record, class Slackness>
RunOutput run_dual_loop(const NetworkSpec& net, const SolverOptions& opt, Policy policy,
                        Prices prices, Solve&& solve, Dual&& dual_at, Update&& update,
                        Repair&& repair, Record&& record, Slackness&& slackness) {
  (void)net;
  RunOutput out;
  out.trace.policy = policy;
  auto& res = out.result;
  res.policy = policy;
  double best_dual = std::numeric_limits<double>::infinity();
  RepairedPoint best;
  Prices dual_prices = prices;
  bool have_best = false;
  RunningAverage mean_prices;
  Prices low_prices = prices;
  std::size_t t = 1;
  for (;; ++t) {
    const double beta = opt.schedule.at(t);
    Snapshot snap = solve(prices);
    Prices next = update(prices, snap, beta);
    if (snap.dual_value < best_dual) {
      best_dual = snap.dual_value;
      dual_prices = prices;
    }
    mean_prices.add(prices.lambda, prices.mu);
    if (mean_prices.count() == 1) {
      low_prices = prices;
    } else {
      for (std::size_t i = 0; i < prices.lambda.size(); ++i) {
        low_prices.lambda[i] = std::min(low_prices.lambda[i], prices.lambda[i]);
      }
      for (std::size_t i = 0; i < prices.mu.size(); ++i) {
        low_prices.mu[i] = std::min(low_prices.mu[i], prices.mu[i]);
      }
    }
    const double scale = opt.schedule.beta0 / beta;
    const double move = scale * std::max(price_movement(next.lambda, prices.lambda),
                                         price_movement(next.mu, prices.mu));
    const bool move_ok = move < opt.stop.price_tolerance;
    const bool at_cap = t >= opt.stop.max_iterations;
    double repaired_utility = std::numeric_limits<double>::quiet_NaN();
    if (t == 1 || move_ok || at_cap || opt.check_interval <= 1 || t % opt.check_interval == 0) {
      if (mean_prices.count() > 1) {
        Prices mean = prices;
        mean.lambda = mean_prices.first();
        mean.mu = mean_prices.second();
        for (const Prices* cand : {&mean, &low_prices}) {
          const double d = dual_at(*cand);
          if (d < best_dual) {
            best_dual = d;
            dual_prices = *cand;
          }
        }
      }
      RepairedPoint point = repair(prices, snap);
      repaired_utility = point.total_utility;
      // Feasible points always beat infeasible ones.
      const bool better = !have_best || (point.feasible && !best.feasible) ||
                          (point.feasible == best.feasible && point.total_utility > best.total_utility);
      if (better) {
        best = std::move(point);
        have_best = true;
      }
    }
    const double gap = relative_gap(best_dual, best.total_utility);
    const bool gap_ok = best.feasible && gap < opt.stop.gap_tolerance;
    const bool last = gap_ok || move_ok || at_cap;
    if (keep_record(opt, t) || (opt.record_trace && last)) {
      TraceRecord rec;
      rec.t = t;
      rec.step = beta;
      rec.lambda = prices.lambda;
      rec.mu = prices.mu;
      rec.utility = snap.utility;
      rec.dual_value = snap.dual_value;
      rec.repaired_utility = repaired_utility;
      record(rec, snap);
      out.trace.records.push_back(std::move(rec));
    }
    if (last) {
      res.dual_value = snap.dual_value;
      res.converged = gap_ok || move_ok;
      res.stop_reason = gap_ok ? "duality gap" : move_ok ? "price movement" : "iteration limit";
      break;
    }
    prices = std::move(next);
  }
  res.iterations = t;
  res.lambda = std::move(dual_prices.lambda);
  res.mu = std::move(dual_prices.mu);
  res.best_dual_value = best_dual;
  res.allocation = std::move(best.allocation);
  res.utilities = std::move(best.utilities);
  res.total_utility = best.total_utility;
  res.feasible = best.feasible;
  res.relative_gap = relative_gap(best_dual, res.total_utility);
  slackness(res);
  if (!res.feasible) res.warnings.push_back("repaired point is still infeasible");
  return out;
}

}  // namespace detail
}  // namespace rrnum
