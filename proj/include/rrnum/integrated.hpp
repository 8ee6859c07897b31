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
#include "rrnum/local_solvers.hpp"
#include "rrnum/network.hpp"
#include "rrnum/repair.hpp"
#include "rrnum/result.hpp"
#include "rrnum/schedule.hpp"
#include "rrnum/validation.hpp"

namespace rrnum {

struct PriceStateIntegrated {
  std::vector<double> lambda;  // per link
  std::vector<double> mu;      // per source
};

// Everything the sources and links compute at one price vector.
struct IntegratedSnapshot {
  std::vector<double> x;
  std::vector<double> reliability;       // R_s requested by the sources
  std::vector<double> code_rates;        // r_l
  std::vector<double> path_reliability;  // R^s = 1 - sum_{l in L(s)} E_l(r_l)
  std::vector<double> link_rate;         // x^l = sum_{s in S(l)} x_s
  std::vector<double> capacity_residual;     // r_l C_l - x^l
  std::vector<double> reliability_residual;  // R^s - R_s
  double utility = 0.0;
  double dual_value = 0.0;
};

inline void check_prices(const NetworkSpec& net, const PriceStateIntegrated& p) {
  if (p.lambda.size() != net.num_links() || p.mu.size() != net.num_sources()) {
    throw StructuralError("price vector sizes do not match the network");
  }
  for (double v : p.lambda) if (!(v >= 0.0)) throw DomainError("negative congestion price");
  for (double v : p.mu) if (!(v >= 0.0)) throw DomainError("negative reliability price");
}

inline double path_price(const NetworkSpec& net, std::span<const double> lambda, std::size_t s) {
  double sum = 0.0;
  for (std::size_t l : net.source(s).route) sum += lambda[l];
  return sum;
}

inline IntegratedSnapshot solve_subproblems_integrated(const NetworkSpec& net,
                                                       const PriceStateIntegrated& prices) {
  check_prices(net, prices);
  const std::size_t S = net.num_sources();
  const std::size_t L = net.num_links();
  IntegratedSnapshot snap;
  snap.x.resize(S);
  snap.reliability.resize(S);
  snap.code_rates.resize(L);
  double dual = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    try {
      const auto resp = solve_source_integrated(net.source(s).utility,
                                                path_price(net, prices.lambda, s), prices.mu[s]);
      snap.x[s] = resp.rate;
      snap.reliability[s] = resp.reliability;
      snap.utility += net.source(s).utility.rate_value(resp.rate) +
                      net.source(s).utility.reliability_value(resp.reliability);
      dual += resp.value + prices.mu[s];
    } catch (const NumericalError& e) {
      throw NumericalError("source " + net.label_source(s) + ": " + e.what());
    }
  }
  for (std::size_t l = 0; l < L; ++l) {
    double mu_sum = 0.0;
    double x_min = 0.0;
    for (std::size_t s : net.sources_on(l)) {
      mu_sum += prices.mu[s];
      x_min += net.source(s).x_min();
    }
    try {
      // sum x_min <= x^l <= r C bounds r from below.
      const double cap = net.link(l).capacity_max;
      const auto resp = solve_link_integrated(net.link(l).error_model, prices.lambda[l], mu_sum, cap,
                                              std::min(1.0, x_min / cap));
      snap.code_rates[l] = resp.code_rate;
      dual += resp.value;
    } catch (const NumericalError& e) {
      throw NumericalError("link " + net.label_link(l) + ": " + e.what());
    }
  }
  snap.dual_value = dual;
  snap.link_rate.assign(L, 0.0);
  snap.capacity_residual.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t s : net.sources_on(l)) snap.link_rate[l] += snap.x[s];
    snap.capacity_residual[l] = snap.code_rates[l] * net.link(l).capacity_max - snap.link_rate[l];
  }
  const auto rates = CodeRates::per_link(snap.code_rates);
  snap.path_reliability.resize(S);
  snap.reliability_residual.resize(S);
  for (std::size_t s = 0; s < S; ++s) {
    snap.path_reliability[s] = end_to_end_reliability_approx(net, rates, s);
    snap.reliability_residual[s] = snap.path_reliability[s] - snap.reliability[s];
  }
  return snap;
}

inline PriceStateIntegrated update_prices_integrated(const PriceStateIntegrated& prices,
                                                     const IntegratedSnapshot& snap, double beta) {
  PriceStateIntegrated next = prices;
  for (std::size_t s = 0; s < next.mu.size(); ++s) {
    next.mu[s] = std::max(0.0, prices.mu[s] - beta * snap.reliability_residual[s]);
  }
  for (std::size_t l = 0; l < next.lambda.size(); ++l) {
    next.lambda[l] = std::max(0.0, prices.lambda[l] - beta * snap.capacity_residual[l]);
  }
  return next;
}

inline std::pair<PriceStateIntegrated, IntegratedSnapshot> iterate_once(
    const NetworkSpec& net, const PriceStateIntegrated& prices, const StepSchedule& schedule,
    std::size_t t) {
  auto snap = solve_subproblems_integrated(net, prices);
  auto next = update_prices_integrated(prices, snap, schedule.at(t));
  return {std::move(next), std::move(snap)};
}

// sum_s max_{x,R}(U_s - lambda^s x - mu_s R) + sum_l max_r(lambda_l r C_l - mu^l E_l(r)) + sum_s mu_s
inline double dual_objective(const NetworkSpec& net, const PriceStateIntegrated& prices) {
  return solve_subproblems_integrated(net, prices).dual_value;
}

inline PriceStateIntegrated initial_prices_integrated(const NetworkSpec& net,
                                                      const SolverOptions& opt) {
  PriceStateIntegrated p;
  p.lambda.assign(net.num_links(), opt.initial_lambda);
  p.mu.resize(net.num_sources());
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    p.mu[s] = opt.mu_from_marginal_utility ? net.source(s).utility.reliability_first(1.0)
                                           : opt.initial_mu;
  }
  check_prices(net, p);
  return p;
}

inline void fill_slackness_integrated(const NetworkSpec& net, SolveResult& res) {
  const auto& a = res.allocation;
  double ml = 0.0;
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    double xl = 0.0;
    for (std::size_t s : net.sources_on(l)) xl += a.x[s];
    const double resid = a.code_rates.values[l] * net.link(l).capacity_max - xl;
    ml = std::max(ml, std::abs(res.lambda[l] * resid));
  }
  double mm = 0.0;
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    const double resid = end_to_end_reliability_approx(net, a.code_rates, s) - a.reliability[s];
    mm = std::max(mm, std::abs(res.mu[s] * resid));
  }
  res.max_lambda_slackness = ml;
  res.max_mu_slackness = mm;
}

// Algorithm 1: synchronous source/link solves followed by the projected
// subgradient price updates.
inline RunOutput run_integrated(const NetworkSpec& net, const SolverOptions& opt) {
  auto warnings = enforce_validation(net, false, opt.strict).warnings;
  RunningAverage average;
  auto out = detail::run_dual_loop<PriceStateIntegrated, IntegratedSnapshot>(
      net, opt, Policy::integrated, initial_prices_integrated(net, opt),
      [&](const PriceStateIntegrated& p) {
        auto s = solve_subproblems_integrated(net, p);
        average.add(s.x, s.code_rates);
        return s;
      },
      [&](const PriceStateIntegrated& p) { return solve_subproblems_integrated(net, p).dual_value; },
      [](const PriceStateIntegrated& p, const IntegratedSnapshot& s, double beta) {
        return update_prices_integrated(p, s, beta);
      },
      [&](const PriceStateIntegrated&, const IntegratedSnapshot& s) {
        auto point = repair_allocation(net, s.x, CodeRates::per_link(s.code_rates));
        if (average.count() > 1) {
          auto avg = repair_allocation(net, average.first(), CodeRates::per_link(average.second()));
          if (better_point(avg, point)) return avg;
        }
        return point;
      },
      [](TraceRecord& rec, const IntegratedSnapshot& s) {
        rec.x = s.x;
        rec.reliability = s.reliability;
        rec.code_rates = s.code_rates;
        rec.capacity_residual = s.capacity_residual;
        rec.reliability_residual = s.reliability_residual;
      },
      [&](SolveResult& r) { fill_slackness_integrated(net, r); });
  warnings.insert(warnings.end(), out.result.warnings.begin(), out.result.warnings.end());
  out.result.warnings = std::move(warnings);
  return out;
}

}  // namespace rrnum
