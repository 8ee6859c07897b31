#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rrnum/dual_loop.hpp"
#include "rrnum/errors.hpp"
#include "rrnum/integrated.hpp"
#include "rrnum/local_solvers.hpp"
#include "rrnum/network.hpp"
#include "rrnum/repair.hpp"
#include "rrnum/result.hpp"
#include "rrnum/schedule.hpp"
#include "rrnum/validation.hpp"

namespace rrnum {

struct PriceStateDifferentiated {
  std::vector<double> lambda;  // per (link, source) pair, NetworkSpec::pairs() order
  std::vector<double> mu;      // per source
};

struct DifferentiatedSnapshot {
  std::vector<double> x_log;  // x'_s
  std::vector<double> x;      // exp(x'_s)
  std::vector<double> reliability;
  std::vector<double> code_rates;  // r_{l,s}
  std::vector<double> shares;      // c_{l,s}
  std::vector<double> path_reliability;
  std::vector<double> pair_residual;         // log c + log r - x'
  std::vector<double> reliability_residual;  // R^s - R_s
  double utility = 0.0;
  double dual_value = 0.0;
};

inline void check_prices(const NetworkSpec& net, const PriceStateDifferentiated& p) {
  if (p.lambda.size() != net.num_pairs() || p.mu.size() != net.num_sources()) {
    throw StructuralError("price vector sizes do not match the network");
  }
  for (double v : p.lambda) if (!(v >= 0.0)) throw DomainError("negative congestion price");
  for (double v : p.mu) if (!(v >= 0.0)) throw DomainError("negative reliability price");
}

inline DifferentiatedSnapshot solve_subproblems_differentiated(
    const NetworkSpec& net, const PriceStateDifferentiated& prices) {
  check_prices(net, prices);
  const std::size_t S = net.num_sources();
  const std::size_t P = net.num_pairs();
  const auto& pairs = net.pairs();
  DifferentiatedSnapshot snap;
  snap.x_log.resize(S);
  snap.x.resize(S);
  snap.reliability.resize(S);
  snap.code_rates.resize(P);
  snap.shares.resize(P);
  double dual = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    double lam = 0.0;
    for (std::size_t p = net.pairs_begin(s); p < net.pairs_end(s); ++p) lam += prices.lambda[p];
    try {
      const auto& u = net.source(s).utility;
      const auto resp = solve_source_differentiated(u, lam, prices.mu[s]);
      snap.x_log[s] = resp.rate;
      snap.x[s] = std::exp(resp.rate);
      snap.reliability[s] = resp.reliability;
      snap.utility += u.log_rate_value(resp.rate) + u.reliability_value(resp.reliability);
      dual += resp.value + prices.mu[s];
    } catch (const NumericalError& e) {
      throw NumericalError("source " + net.label_source(s) + ": " + e.what());
    }
  }
  std::vector<double> lam;
  std::vector<double> mu;
  std::vector<double> x_min;
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    const auto& on = net.pairs_on(l);
    if (on.empty()) continue;
    lam.clear();
    mu.clear();
    x_min.clear();
    for (std::size_t p : on) {
      lam.push_back(prices.lambda[p]);
      mu.push_back(prices.mu[pairs[p].source]);
      x_min.push_back(net.source(pairs[p].source).x_min());
    }
    try {
      const double cap = net.link(l).capacity_max;
      const auto resp = solve_link_differentiated(net.link(l).error_model, lam, mu, cap,
                                                  implied_link_bounds(x_min, cap));
      for (std::size_t i = 0; i < on.size(); ++i) {
        snap.code_rates[on[i]] = resp.code_rates[i];
        snap.shares[on[i]] = resp.shares[i];
      }
      dual += resp.value;
    } catch (const NumericalError& e) {
      throw NumericalError("link " + net.label_link(l) + ": " + e.what());
    }
  }
  snap.dual_value = dual;
  snap.pair_residual.resize(P);
  for (std::size_t p = 0; p < P; ++p) {
    snap.pair_residual[p] =
        std::log(snap.shares[p]) + std::log(snap.code_rates[p]) - snap.x_log[pairs[p].source];
  }
  const auto rates = CodeRates::per_pair(snap.code_rates);
  snap.path_reliability.resize(S);
  snap.reliability_residual.resize(S);
  for (std::size_t s = 0; s < S; ++s) {
    snap.path_reliability[s] = end_to_end_reliability_approx(net, rates, s);
    snap.reliability_residual[s] = snap.path_reliability[s] - snap.reliability[s];
  }
  return snap;
}

inline PriceStateDifferentiated update_prices_differentiated(const PriceStateDifferentiated& prices,
                                                             const DifferentiatedSnapshot& snap,
                                                             double beta) {
  PriceStateDifferentiated next = prices;
  for (std::size_t s = 0; s < next.mu.size(); ++s) {
    next.mu[s] = std::max(0.0, prices.mu[s] - beta * snap.reliability_residual[s]);
  }
  for (std::size_t p = 0; p < next.lambda.size(); ++p) {
    next.lambda[p] = std::max(0.0, prices.lambda[p] - beta * snap.pair_residual[p]);
  }
  return next;
}

inline std::pair<PriceStateDifferentiated, DifferentiatedSnapshot> iterate_once_diff(
    const NetworkSpec& net, const PriceStateDifferentiated& prices, const StepSchedule& schedule,
    std::size_t t) {
  auto snap = solve_subproblems_differentiated(net, prices);
  auto next = update_prices_differentiated(prices, snap, schedule.at(t));
  return {std::move(next), std::move(snap)};
}

inline double dual_objective_diff(const NetworkSpec& net, const PriceStateDifferentiated& prices) {
  return solve_subproblems_differentiated(net, prices).dual_value;
}

inline PriceStateDifferentiated initial_prices_differentiated(const NetworkSpec& net,
                                                              const SolverOptions& opt) {
  PriceStateDifferentiated p;
  p.lambda.assign(net.num_pairs(), opt.initial_lambda);
  p.mu.resize(net.num_sources());
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    p.mu[s] = opt.mu_from_marginal_utility ? net.source(s).utility.reliability_first(1.0)
                                           : opt.initial_mu;
  }
  check_prices(net, p);
  return p;
}

struct TransformReport {
  std::vector<double> log_lower;  // x'_min per source
  std::vector<double> log_upper;  // x'_max per source
};

// Bounds of the log-rate coordinates; rejects rates that can reach zero.
inline TransformReport transform_check(const NetworkSpec& net) {
  TransformReport rep;
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    const auto& src = net.source(s);
    if (!(src.x_min() > 0.0)) {
      throw ValidationError("source " + net.label_source(s) +
                            ": x_min must be positive for the log-rate change of variables");
    }
    rep.log_lower.push_back(std::log(src.x_min()));
    rep.log_upper.push_back(std::log(src.x_max()));
  }
  return rep;
}

// Largest relative gap |x_s / r_{l,s} - c_{l,s}| / c_{l,s} over pairs whose
// congestion price exceeds `active`.
inline double pair_constraint_tightness(const NetworkSpec& net, const FlowAllocation& a,
                                        std::span<const double> lambda, double active) {
  double worst = 0.0;
  for (std::size_t p = 0; p < net.num_pairs(); ++p) {
    if (!(lambda[p] > active)) continue;
    const double need = a.x[net.pairs()[p].source] / a.code_rates.values[p];
    worst = std::max(worst, std::abs(need - a.shares[p]) / a.shares[p]);
  }
  return worst;
}

inline void fill_slackness_differentiated(const NetworkSpec& net, SolveResult& res) {
  const auto& a = res.allocation;
  double ml = 0.0;
  for (std::size_t p = 0; p < net.num_pairs(); ++p) {
    const double x = a.x[net.pairs()[p].source];
    const double resid = std::log(a.shares[p]) + std::log(a.code_rates.values[p]) - std::log(x);
    ml = std::max(ml, std::abs(res.lambda[p] * resid));
  }
  double mm = 0.0;
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    const double resid = end_to_end_reliability_approx(net, a.code_rates, s) - a.reliability[s];
    mm = std::max(mm, std::abs(res.mu[s] * resid));
  }
  res.max_lambda_slackness = ml;
  res.max_mu_slackness = mm;
}

// Algorithm 2 on the log-rate problem. The reported point is in original
// coordinates, x = exp(x').
inline RunOutput run_differentiated(const NetworkSpec& net, const SolverOptions& opt) {
  transform_check(net);
  auto warnings = enforce_validation(net, true, opt.strict).warnings;
  // Averaged in the coordinates the iteration works in.
  RunningAverage average;
  auto out = detail::run_dual_loop<PriceStateDifferentiated, DifferentiatedSnapshot>(
      net, opt, Policy::differentiated, initial_prices_differentiated(net, opt),
      [&](const PriceStateDifferentiated& p) {
        auto s = solve_subproblems_differentiated(net, p);
        average.add(s.x_log, s.code_rates);
        return s;
      },
      [&](const PriceStateDifferentiated& p) {
        return solve_subproblems_differentiated(net, p).dual_value;
      },
      [](const PriceStateDifferentiated& p, const DifferentiatedSnapshot& s, double beta) {
        return update_prices_differentiated(p, s, beta);
      },
      [&](const PriceStateDifferentiated& p, const DifferentiatedSnapshot& s) {
        auto point = repair_allocation(net, s.x, CodeRates::per_pair(s.code_rates), p.mu);
        if (average.count() > 1) {
          std::vector<double> x(average.first().size());
          for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::exp(average.first()[i]);
          auto avg = repair_allocation(net, std::move(x), CodeRates::per_pair(average.second()), p.mu);
          if (better_point(avg, point)) return avg;
        }
        return point;
      },
      [](TraceRecord& rec, const DifferentiatedSnapshot& s) {
        rec.x = s.x;
        rec.reliability = s.reliability;
        rec.code_rates = s.code_rates;
        rec.shares = s.shares;
        rec.capacity_residual = s.pair_residual;
        rec.reliability_residual = s.reliability_residual;
      },
      [&](SolveResult& r) { fill_slackness_differentiated(net, r); });
  warnings.insert(warnings.end(), out.result.warnings.begin(), out.result.warnings.end());
  out.result.warnings = std::move(warnings);
  return out;
}

}  // namespace rrnum
