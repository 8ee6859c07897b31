#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rrnum/barrier.hpp"
#include "rrnum/errors.hpp"
#include "rrnum/local_solvers.hpp"
#include "rrnum/network.hpp"
#include "rrnum/validation.hpp"

namespace rrnum {

inline constexpr double kStaticLinkError = 0.025;

struct OracleConfig {
  enum class Method { interior_point, grid_refine };
  Method method = Method::interior_point;
  // grid_refine: points per coordinate per pass (odd, >= 9 so that the next
  // box still covers one grid spacing on each side), box shrink per pass (>= 4).
  std::size_t grid_points = 9;
  double shrink = 4.0;
  std::size_t min_passes = 2;
  std::size_t max_passes = 40;
  double cell_tolerance = 1e-9;
  // Coordinates beyond this count are refined one at a time instead of on a
  // full tensor grid.
  std::size_t tensor_dimensions = 3;
  std::size_t max_evaluations = 5'000'000;
  BarrierOptions barrier;
  double feasibility_tolerance = 1e-9;
};

inline const char* oracle_method_name(OracleConfig::Method m) {
  return m == OracleConfig::Method::interior_point ? "interior_point" : "grid_refine";
}

struct OracleCertificate {
  OracleConfig::Method method = OracleConfig::Method::interior_point;
  bool complete = false;
  double gap_bound = std::numeric_limits<double>::quiet_NaN();  // interior point: m / t
  double cell_size = std::numeric_limits<double>::quiet_NaN();  // grid refine: final spacing
  std::size_t passes = 0;
  std::size_t evaluations = 0;
  bool convexity_guaranteed = true;
  std::string note;
};

struct OracleSolution {
  Policy policy = Policy::integrated;
  FlowAllocation allocation;
  std::vector<double> utilities;
  double total_utility = -std::numeric_limits<double>::infinity();
  bool feasible = false;
  std::vector<double> lambda;  // capacity multipliers (per link, or per pair)
  std::vector<double> mu;      // reliability multipliers per source
  OracleCertificate certificate;
};

namespace detail {

inline Univariate rate_term(const Utility& u) {
  return [&u](double x) { return Taylor2{u.rate_value(x), u.rate_first(x), u.rate_second(x)}; };
}
inline Univariate log_rate_term(const Utility& u) {
  return [&u](double y) {
    return Taylor2{u.log_rate_value(y), u.log_rate_first(y), u.log_rate_second(y)};
  };
}
inline Univariate reliability_term(const Utility& u) {
  return [&u](double r) {
    return Taylor2{u.reliability_value(r), u.reliability_first(r), u.reliability_second(r)};
  };
}
inline Univariate error_term(const ErrorModel& m) {
  return [&m](double r) { return Taylor2{m.value(r), m.derivative(r), m.second_derivative(r)}; };
}
// E(e^rho), convex in rho because E is increasing and convex.
inline Univariate log_error_term(const ErrorModel& m) {
  return [&m](double rho) {
    const double r = std::exp(rho);
    const double d1 = m.derivative(r);
    return Taylor2{m.value(r), d1 * r, m.second_derivative(r) * r * r + d1 * r};
  };
}

inline double rate_lower(const Utility& u) { return u.params().x_min; }
inline bool rate_fixed(const Utility& u) { return u.is_alpha_fair() && u.params().a == 0.0; }
inline bool reliability_fixed(const Utility& u) { return u.is_alpha_fair() && u.params().a == 1.0; }

inline bool convexity_guaranteed(const NetworkSpec& net, bool log_rates) {
  return validate_network(net, log_rates).ok();
}

inline void fill_utilities(const NetworkSpec& net, OracleSolution& sol) {
  sol.utilities.resize(net.num_sources());
  sol.total_utility = 0.0;
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    const auto& u = net.source(s).utility;
    sol.utilities[s] =
        u.rate_value(sol.allocation.x[s]) + u.reliability_value(sol.allocation.reliability[s]);
    sol.total_utility += sol.utilities[s];
  }
}

// Rate allocation with fixed code rates:
//   max sum_s U^x_s(x_s)  s.t.  sum_{(l,s)} x_s / r_{l,s} <= C_l,  x in box.
// Returns nothing when even x_min does not fit.
struct RateAllocation {
  std::vector<double> x;
  double value = 0.0;
  std::vector<double> lambda;
  BarrierResult barrier;
};

inline std::optional<RateAllocation> allocate_rates(const NetworkSpec& net, const CodeRates& r,
                                                    const BarrierOptions& bopt) {
  const std::size_t S = net.num_sources();
  SeparableProgram prog;
  for (std::size_t s = 0; s < S; ++s) {
    const auto& u = net.source(s).utility;
    const double lo = u.params().x_min;
    prog.add_variable(lo, rate_fixed(u) ? lo : u.params().x_max);
    prog.objective.push_back({s, rate_term(u)});
  }
  std::vector<double> base(net.num_links(), 0.0);
  std::vector<double> extra(net.num_links(), 0.0);
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    SeparableProgram::Constraint c;
    c.constant = -net.link(l).capacity_max;
    for (std::size_t p : net.pairs_on(l)) {
      const std::size_t s = net.pairs()[p].source;
      const double rate = r.at(net, p);
      if (!(rate > 0.0)) return std::nullopt;
      c.linear.emplace_back(s, 1.0 / rate);
      base[l] += prog.lo[s] / rate;
      extra[l] += (prog.hi[s] - prog.lo[s]) / rate;
    }
    c.label = "capacity " + net.label_link(l);
    prog.constraints.push_back(std::move(c));
  }
  double theta = 1e-3;
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    const double slack = net.link(l).capacity_max - base[l];
    if (!(slack > 1e-12 * net.link(l).capacity_max)) return std::nullopt;
    if (extra[l] > 0.0) theta = std::min(theta, 0.5 * slack / extra[l]);
  }
  std::vector<double> z(S);
  for (std::size_t s = 0; s < S; ++s) z[s] = prog.lo[s] + theta * (prog.hi[s] - prog.lo[s]);
  RateAllocation out;
  out.barrier = solve_barrier(prog, z, bopt);
  out.x = out.barrier.z;
  out.value = out.barrier.objective;
  out.lambda = out.barrier.multipliers;
  return out;
}

}  // namespace detail

// Basic NUM with every link held at the code rate that gives error
// probability `link_error`: capacity C_l * E_l^{-1}(link_error) and
// R_s = 1 - |L(s)| * link_error.
inline OracleSolution solve_basic_num(const NetworkSpec& net,
                                      double link_error = kStaticLinkError,
                                      const OracleConfig& cfg = {}) {
  if (!(link_error >= 0.0 && link_error < 1.0)) {
    throw DomainError("fixed link error probability must lie in [0, 1)");
  }
  OracleSolution sol;
  sol.policy = Policy::static_reliability;
  sol.certificate.method = OracleConfig::Method::interior_point;
  std::vector<double> rates(net.num_links());
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    rates[l] = net.link(l).error_model.inverse(link_error);
  }
  std::vector<double> reliability(net.num_sources());
  bool reliable = true;
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    reliability[s] = 1.0 - static_cast<double>(net.source(s).route.size()) * link_error;
    if (reliability[s] < net.source(s).r_min() - 1e-12) reliable = false;
    reliability[s] = std::max(reliability[s], net.source(s).r_min());
  }
  sol.allocation.code_rates = CodeRates::per_link(rates);
  sol.allocation.reliability = reliability;
  if (!reliable) {
    sol.certificate.note = "static reliability below R_min for some source";
    sol.allocation.x.assign(net.num_sources(), std::numeric_limits<double>::quiet_NaN());
    return sol;
  }
  auto alloc = detail::allocate_rates(net, sol.allocation.code_rates, cfg.barrier);
  if (!alloc) {
    sol.certificate.note = "minimum rates exceed the static link capacity";
    sol.allocation.x.assign(net.num_sources(), std::numeric_limits<double>::quiet_NaN());
    return sol;
  }
  sol.allocation.x = alloc->x;
  sol.lambda = alloc->lambda;
  sol.mu.assign(net.num_sources(), 0.0);
  sol.feasible = true;
  sol.certificate.complete = alloc->barrier.complete;
  sol.certificate.gap_bound = alloc->barrier.gap_bound;
  detail::fill_utilities(net, sol);
  return sol;
}

namespace detail {

// Interior point on problem (2) in variables (x, R, r).
inline OracleSolution integrated_interior_point(const NetworkSpec& net, const OracleConfig& cfg) {
  const std::size_t S = net.num_sources();
  const std::size_t L = net.num_links();
  SeparableProgram prog;
  std::vector<double> z;
  for (std::size_t s = 0; s < S; ++s) {
    const auto& u = net.source(s).utility;
    const double lo = u.params().x_min;
    const double hi = rate_fixed(u) ? lo : u.params().x_max;
    prog.add_variable(lo, hi);
    prog.objective.push_back({s, rate_term(u)});
    z.push_back(lo + 1e-3 * (hi - lo));
  }
  for (std::size_t s = 0; s < S; ++s) {
    const auto& u = net.source(s).utility;
    const double lo = u.params().r_min;
    prog.add_variable(lo, reliability_fixed(u) ? lo : 1.0);
    prog.objective.push_back({S + s, reliability_term(u)});
    z.push_back(0.0);
  }
  for (std::size_t l = 0; l < L; ++l) {
    prog.add_variable(0.0, 1.0);
    double load = 0.0;
    for (std::size_t s : net.sources_on(l)) load += z[s];
    const double need = load / net.link(l).capacity_max;
    if (!(need < 1.0)) throw ValidationError("minimum rates do not fit on link " + net.label_link(l));
    z.push_back(need + 1e-3 * (1.0 - need));
  }
  for (std::size_t s = 0; s < S; ++s) {
    SeparableProgram::Constraint c;
    c.constant = -1.0;
    c.linear.emplace_back(S + s, 1.0);
    double err = 0.0;
    for (std::size_t l : net.source(s).route) {
      c.convex.push_back({2 * S + l, error_term(net.link(l).error_model)});
      err += net.link(l).error_model.value(z[2 * S + l]);
    }
    const double top = std::min(1.0, 1.0 - err);
    if (!(top > prog.lo[S + s])) {
      throw ValidationError("no strictly feasible reliability for source " + net.label_source(s));
    }
    z[S + s] = prog.lo[S + s] == prog.hi[S + s] ? prog.lo[S + s] : 0.5 * (prog.lo[S + s] + top);
    c.label = "reliability " + net.label_source(s);
    prog.constraints.push_back(std::move(c));
  }
  for (std::size_t l = 0; l < L; ++l) {
    SeparableProgram::Constraint c;
    for (std::size_t s : net.sources_on(l)) c.linear.emplace_back(s, 1.0);
    c.linear.emplace_back(2 * S + l, -net.link(l).capacity_max);
    c.label = "capacity " + net.label_link(l);
    prog.constraints.push_back(std::move(c));
  }
  const auto br = solve_barrier(prog, z, cfg.barrier);
  OracleSolution sol;
  sol.policy = Policy::integrated;
  sol.allocation.x.assign(br.z.begin(), br.z.begin() + S);
  sol.allocation.reliability.assign(br.z.begin() + S, br.z.begin() + 2 * S);
  sol.allocation.code_rates = CodeRates::per_link({br.z.begin() + 2 * S, br.z.end()});
  sol.mu.assign(br.multipliers.begin(), br.multipliers.begin() + S);
  sol.lambda.assign(br.multipliers.begin() + S, br.multipliers.end());
  sol.feasible = true;
  sol.certificate.method = OracleConfig::Method::interior_point;
  sol.certificate.complete = br.complete;
  sol.certificate.gap_bound = br.gap_bound;
  sol.certificate.evaluations = br.newton_steps;
  fill_utilities(net, sol);
  return sol;
}

// Interior point on problem (10) in variables (x' = log x, R, rho = log r, c).
inline OracleSolution differentiated_interior_point(const NetworkSpec& net,
                                                    const OracleConfig& cfg) {
  const std::size_t S = net.num_sources();
  const std::size_t P = net.num_pairs();
  const auto& pairs = net.pairs();
  SeparableProgram prog;
  std::vector<double> z;
  for (std::size_t s = 0; s < S; ++s) {
    const auto& u = net.source(s).utility;
    const double lo = std::log(u.params().x_min);
    const double hi = rate_fixed(u) ? lo : std::log(u.params().x_max);
    prog.add_variable(lo, hi);
    prog.objective.push_back({s, log_rate_term(u)});
    z.push_back(lo + 1e-3 * (hi - lo));
  }
  for (std::size_t s = 0; s < S; ++s) {
    const auto& u = net.source(s).utility;
    prog.add_variable(u.params().r_min, reliability_fixed(u) ? u.params().r_min : 1.0);
    prog.objective.push_back({S + s, reliability_term(u)});
    z.push_back(0.0);
  }
  const std::size_t rho0 = 2 * S;
  const std::size_t c0 = 2 * S + P;
  std::vector<double> rho_start(P);
  std::vector<double> c_start(P);
  for (std::size_t p = 0; p < P; ++p) {
    const std::size_t l = pairs[p].link;
    const double cap = net.link(l).capacity_max;
    c_start[p] = cap / static_cast<double>(net.sources_on(l).size()) * (1.0 - 1e-3);
    const double need = std::exp(z[pairs[p].source]) / c_start[p];
    if (!(need < 1.0)) throw ValidationError("minimum rates do not fit on link " + net.label_link(l));
    rho_start[p] = std::log(need + 1e-3 * (1.0 - need));
  }
  for (std::size_t p = 0; p < P; ++p) {
    prog.add_variable(std::log(kCodeRateFloor), 0.0);
    z.push_back(rho_start[p]);
  }
  for (std::size_t p = 0; p < P; ++p) {
    prog.add_variable(0.0, net.link(pairs[p].link).capacity_max);
    z.push_back(c_start[p]);
  }
  for (std::size_t s = 0; s < S; ++s) {
    SeparableProgram::Constraint c;
    c.constant = -1.0;
    c.linear.emplace_back(S + s, 1.0);
    double err = 0.0;
    for (std::size_t p = net.pairs_begin(s); p < net.pairs_end(s); ++p) {
      const auto& m = net.link(pairs[p].link).error_model;
      c.convex.push_back({rho0 + p, log_error_term(m)});
      err += m.value(std::exp(z[rho0 + p]));
    }
    const double top = std::min(1.0, 1.0 - err);
    if (!(top > prog.lo[S + s])) {
      throw ValidationError("no strictly feasible reliability for source " + net.label_source(s));
    }
    z[S + s] = prog.lo[S + s] == prog.hi[S + s] ? prog.lo[S + s] : 0.5 * (prog.lo[S + s] + top);
    c.label = "reliability " + net.label_source(s);
    prog.constraints.push_back(std::move(c));
  }
  for (std::size_t p = 0; p < P; ++p) {
    SeparableProgram::Constraint c;
    c.linear.emplace_back(pairs[p].source, 1.0);
    c.linear.emplace_back(rho0 + p, -1.0);
    c.convex.push_back({c0 + p, [](double v) { return Taylor2{-std::log(v), -1.0 / v, 1.0 / (v * v)}; }});
    c.label = "pair " + net.label_link(pairs[p].link) + "/" + net.label_source(pairs[p].source);
    prog.constraints.push_back(std::move(c));
  }
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    SeparableProgram::Constraint c;
    c.constant = -net.link(l).capacity_max;
    for (std::size_t p : net.pairs_on(l)) c.linear.emplace_back(c0 + p, 1.0);
    c.label = "shares " + net.label_link(l);
    prog.constraints.push_back(std::move(c));
  }
  const auto br = solve_barrier(prog, z, cfg.barrier);
  OracleSolution sol;
  sol.policy = Policy::differentiated;
  sol.allocation.x.resize(S);
  for (std::size_t s = 0; s < S; ++s) sol.allocation.x[s] = std::exp(br.z[s]);
  sol.allocation.reliability.assign(br.z.begin() + S, br.z.begin() + 2 * S);
  std::vector<double> r(P);
  for (std::size_t p = 0; p < P; ++p) r[p] = std::exp(br.z[rho0 + p]);
  sol.allocation.code_rates = CodeRates::per_pair(std::move(r));
  sol.allocation.shares.assign(br.z.begin() + c0, br.z.end());
  sol.mu.assign(br.multipliers.begin(), br.multipliers.begin() + S);
  sol.lambda.assign(br.multipliers.begin() + S, br.multipliers.begin() + S + P);
  sol.feasible = true;
  sol.certificate.method = OracleConfig::Method::interior_point;
  sol.certificate.complete = br.complete;
  sol.certificate.gap_bound = br.gap_bound;
  sol.certificate.evaluations = br.newton_steps;
  fill_utilities(net, sol);
  return sol;
}

// Value of a code-rate vector: R_s = 1 - sum E_l on the path, rates from the
// inner allocation. -inf when R_s < R_min or x_min does not fit.
struct CodeRateValue {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> x;
  std::vector<double> reliability;
};

inline CodeRateValue evaluate_code_rates(const NetworkSpec& net, const CodeRates& r,
                                         const BarrierOptions& bopt) {
  CodeRateValue out;
  std::vector<double> rel(net.num_sources());
  double rel_value = 0.0;
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    const auto& u = net.source(s).utility;
    const double path = end_to_end_reliability_approx(net, r, s);
    if (path < u.params().r_min) return out;
    rel[s] = reliability_fixed(u) ? u.params().r_min : std::min(1.0, path);
    rel_value += u.reliability_value(rel[s]);
  }
  auto alloc = allocate_rates(net, r, bopt);
  if (!alloc) return out;
  out.value = alloc->value + rel_value;
  out.x = std::move(alloc->x);
  out.reliability = std::move(rel);
  return out;
}

// Derivative-free refinement over the code-rate coordinates. Each pass
// searches `grid_points` values per coordinate inside the current box (a
// full tensor grid when the dimension is small, one coordinate at a time
// otherwise), recenters on the best point and shrinks the box.
inline OracleSolution grid_refine(const NetworkSpec& net, const OracleConfig& cfg, bool per_pair) {
  if (cfg.grid_points < 9 || cfg.grid_points % 2 == 0) {
    throw DomainError("grid refinement needs an odd number of at least 9 points");
  }
  if (!(cfg.shrink >= 4.0)) throw DomainError("grid refinement must shrink the box at least 4x");
  const std::size_t dim = per_pair ? net.num_pairs() : net.num_links();
  // Search in log r for the per-pair layout (scale of the pair constraint),
  // in r otherwise.
  std::vector<double> lo(dim);
  std::vector<double> hi(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    const std::size_t l = per_pair ? net.pairs()[k].link : k;
    // Each link alone must keep E_l(r) <= 1 - R_min for every source it carries.
    const auto& model = net.link(l).error_model;
    auto reliability_cap = [&](std::size_t s) {
      const double p = 1.0 - net.source(s).r_min();
      const double r = p > 0.0 ? model.inverse(p) : 0.0;
      return r > 0.0 ? r : 1.0;
    };
    double need = 0.0;
    if (per_pair) {
      const std::size_t s = net.pairs()[k].source;
      need = net.source(s).x_min() / net.link(l).capacity_max;
      lo[k] = std::log(need);
      hi[k] = std::max(lo[k], std::log(reliability_cap(s)));
    } else {
      double cap = 1.0;
      for (std::size_t s : net.sources_on(l)) {
        need += net.source(s).x_min();
        cap = std::min(cap, reliability_cap(s));
      }
      lo[k] = std::min(1.0, need / net.link(l).capacity_max);
      hi[k] = std::max(lo[k], cap);
    }
  }
  auto to_rates = [&](const std::vector<double>& v) {
    if (!per_pair) return CodeRates::per_link(v);
    std::vector<double> r(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) r[k] = std::exp(v[k]);
    return CodeRates::per_pair(std::move(r));
  };
  BarrierOptions inner = cfg.barrier;
  inner.gap_tolerance = std::min(inner.gap_tolerance, 1e-12);

  OracleCertificate cert;
  cert.method = OracleConfig::Method::grid_refine;
  std::vector<double> center(dim);
  std::vector<double> half(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    center[k] = 0.5 * (lo[k] + hi[k]);
    half[k] = 0.5 * (hi[k] - lo[k]);
  }
  CodeRateValue best;
  std::vector<double> best_point = center;
  auto eval = [&](const std::vector<double>& v) {
    ++cert.evaluations;
    return evaluate_code_rates(net, to_rates(v), inner);
  };
  auto consider = [&](const std::vector<double>& v) {
    auto r = eval(v);
    if (r.value > best.value) {
      best = std::move(r);
      best_point = v;
      return true;
    }
    return false;
  };
  auto axis = [&](std::size_t k, std::size_t i) {
    const double step = 2.0 * half[k] / static_cast<double>(cfg.grid_points - 1);
    return std::clamp(center[k] - half[k] + step * static_cast<double>(i), lo[k], hi[k]);
  };
  const bool tensor = dim <= cfg.tensor_dimensions;
  const std::size_t n = cfg.grid_points;
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t pass = 0; pass < cfg.max_passes; ++pass) {
    if (cert.evaluations >= cfg.max_evaluations) break;
    if (tensor) {
      std::size_t total = 1;
      for (std::size_t k = 0; k < dim; ++k) total *= n;
      std::vector<double> v(dim);
      for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (std::size_t k = 0; k < dim; ++k) {
          v[k] = axis(k, rem % n);
          rem /= n;
        }
        consider(v);
      }
    } else {
      // Cyclic sweeps until no coordinate improves at this box size.
      for (std::size_t sweep = 0; sweep < 50; ++sweep) {
        bool improved = false;
        for (std::size_t k = 0; k < dim; ++k) {
          std::vector<double> v = best_point;
          center[k] = best_point[k];
          for (std::size_t i = 0; i < n; ++i) {
            v[k] = axis(k, i);
            if (v[k] == best_point[k]) continue;
            if (consider(v)) improved = true;
          }
        }
        if (!improved) break;
      }
    }
    ++cert.passes;
    spacing = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      spacing = std::max(spacing, 2.0 * half[k] / static_cast<double>(n - 1));
      half[k] /= cfg.shrink;
    }
    center = best_point;
    if (cert.passes >= cfg.min_passes && spacing <= cfg.cell_tolerance) break;
  }
  cert.cell_size = spacing;
  cert.complete = spacing <= cfg.cell_tolerance && std::isfinite(best.value);
  OracleSolution sol;
  sol.policy = per_pair ? Policy::differentiated : Policy::integrated;
  if (!std::isfinite(best.value)) {
    cert.note = "no feasible code-rate vector found";
    sol.certificate = cert;
    return sol;
  }
  sol.allocation.x = best.x;
  sol.allocation.reliability = best.reliability;
  sol.allocation.code_rates = to_rates(best_point);
  if (per_pair) {
    const auto load = [&] {
      std::vector<double> ld(net.num_links(), 0.0);
      for (std::size_t p = 0; p < net.num_pairs(); ++p) {
        ld[net.pairs()[p].link] += best.x[net.pairs()[p].source] / sol.allocation.code_rates.values[p];
      }
      return ld;
    }();
    sol.allocation.shares.resize(net.num_pairs());
    for (std::size_t p = 0; p < net.num_pairs(); ++p) {
      const std::size_t l = net.pairs()[p].link;
      sol.allocation.shares[p] = net.link(l).capacity_max *
                                 (best.x[net.pairs()[p].source] / sol.allocation.code_rates.values[p]) /
                                 load[l];
    }
  }
  sol.feasible = true;
  sol.certificate = cert;
  fill_utilities(net, sol);
  return sol;
}

}  // namespace detail

inline OracleSolution solve_global_integrated(const NetworkSpec& net, const OracleConfig& cfg = {}) {
  auto sol = cfg.method == OracleConfig::Method::interior_point
                 ? detail::integrated_interior_point(net, cfg)
                 : detail::grid_refine(net, cfg, false);
  sol.certificate.convexity_guaranteed = detail::convexity_guaranteed(net, false);
  if (!sol.certificate.convexity_guaranteed) sol.certificate.note += " no convexity guarantee";
  return sol;
}

inline OracleSolution solve_global_differentiated(const NetworkSpec& net,
                                                  const OracleConfig& cfg = {}) {
  auto sol = cfg.method == OracleConfig::Method::interior_point
                 ? detail::differentiated_interior_point(net, cfg)
                 : detail::grid_refine(net, cfg, true);
  sol.certificate.convexity_guaranteed = detail::convexity_guaranteed(net, true);
  if (!sol.certificate.convexity_guaranteed) sol.certificate.note += " no convexity guarantee";
  return sol;
}

}  // namespace rrnum
