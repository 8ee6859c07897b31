#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rrnum/local_solvers.hpp"
#include "rrnum/network.hpp"

namespace rrnum {

struct RepairedPoint {
  FlowAllocation allocation;
  std::vector<double> utilities;
  double total_utility = 0.0;
  bool feasible = true;
};

inline constexpr double kFeasibilityTolerance = 1e-9;

// Sum over S(l) of x_s / r_{l,s}: the transmission load the link must carry.
inline std::vector<double> transmission_load(const NetworkSpec& net, std::span<const double> x,
                                             const CodeRates& r) {
  std::vector<double> load(net.num_links(), 0.0);
  for (std::size_t p = 0; p < net.num_pairs(); ++p) {
    const auto& pr = net.pairs()[p];
    load[pr.link] += x[pr.source] / r.at(net, p);
  }
  return load;
}

// Turns a (possibly infeasible) iterate into a feasible point using only
// link- and source-local rules:
//   1. each link picks the most reliable code rates that carry its offered
//      rates (r_l = x^l / C_l for a shared code rate; per-pair rates weigh the
//      sources' reliability prices mu, or are scaled by load_l / C_l when no
//      prices are given), capped at 1;
//   2. sources whose path reliability is below R_min lower the code rates on
//      their route, no further than the rate needed to carry every x_min;
//   3. each source's rate is scaled by the tightest link factor on its path,
//      min(1, C_l / load_l), but not below x_min;
//   4. each source takes the reliability its path delivers, R_s = R^s.
// Shares for the per-pair layout are the link capacity split in proportion
// to the repaired loads. `feasible` reports what is left after the repair.
inline RepairedPoint repair_allocation(const NetworkSpec& net, std::vector<double> x, CodeRates r,
                                       std::span<const double> mu = {}) {
  const bool per_pair = r.layout == CodeRates::Layout::per_pair;
  const auto& pairs = net.pairs();
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    x[s] = std::clamp(x[s], net.source(s).x_min(), net.source(s).x_max());
  }
  if (per_pair && mu.size() == net.num_sources()) {
    std::vector<double> xs;
    std::vector<double> ms;
    for (std::size_t l = 0; l < net.num_links(); ++l) {
      const auto& on = net.pairs_on(l);
      xs.clear();
      ms.clear();
      for (std::size_t p : on) {
        xs.push_back(x[pairs[p].source]);
        ms.push_back(mu[pairs[p].source]);
      }
      const auto rates = reliable_code_rates(net.link(l).error_model, xs, ms, net.link(l).capacity_max);
      for (std::size_t i = 0; i < on.size(); ++i) r.values[on[i]] = rates[i];
    }
  } else if (per_pair) {
    const auto load = transmission_load(net, x, r);
    for (std::size_t p = 0; p < net.num_pairs(); ++p) {
      const double c = net.link(pairs[p].link).capacity_max;
      r.values[p] = std::min(1.0, r.values[p] * load[pairs[p].link] / c);
    }
  } else {
    for (std::size_t l = 0; l < net.num_links(); ++l) {
      double flow = 0.0;
      for (std::size_t s : net.sources_on(l)) flow += x[s];
      r.values[l] = std::min(1.0, flow / net.link(l).capacity_max);
    }
  }
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    const double r_min = net.source(s).r_min();
    if (end_to_end_reliability_approx(net, r, s) >= r_min) continue;
    std::vector<std::size_t> idx;
    std::vector<double> hi;
    std::vector<double> lo;
    for (std::size_t p = net.pairs_begin(s); p < net.pairs_end(s); ++p) {
      const std::size_t l = pairs[p].link;
      double floor_rate = 0.0;
      if (per_pair) {
        floor_rate = net.source(s).x_min() * static_cast<double>(net.sources_on(l).size()) /
                     net.link(l).capacity_max;
      } else {
        for (std::size_t s2 : net.sources_on(l)) floor_rate += net.source(s2).x_min();
        floor_rate /= net.link(l).capacity_max;
      }
      const std::size_t k = per_pair ? p : l;
      idx.push_back(k);
      hi.push_back(r.values[k]);
      lo.push_back(std::min(r.values[k], std::min(1.0, floor_rate)));
    }
    auto apply = [&](double t) {
      for (std::size_t i = 0; i < idx.size(); ++i) r.values[idx[i]] = hi[i] - t * (hi[i] - lo[i]);
    };
    apply(1.0);
    if (end_to_end_reliability_approx(net, r, s) < r_min) continue;
    double a = 0.0;
    double b = 1.0;
    for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
      const double m = 0.5 * (a + b);
      apply(m);
      if (end_to_end_reliability_approx(net, r, s) >= r_min) b = m; else a = m;
    }
    apply(b);
  }

  // Sources pinned at x_min keep their load; the others absorb the excess.
  // Pinning one source can tighten another link, hence the outer rounds.
  std::vector<bool> pinned(net.num_sources(), false);
  for (std::size_t round = 0; round <= net.num_sources(); ++round) {
    std::vector<double> fixed(net.num_links(), 0.0);
    std::vector<double> free_load(net.num_links(), 0.0);
    for (std::size_t p = 0; p < net.num_pairs(); ++p) {
      const auto& pr = pairs[p];
      const double v = x[pr.source] / r.at(net, p);
      (pinned[pr.source] ? fixed : free_load)[pr.link] += v;
    }
    std::vector<double> factor(net.num_links(), 1.0);
    for (std::size_t l = 0; l < net.num_links(); ++l) {
      const double c = net.link(l).capacity_max;
      if (fixed[l] + free_load[l] > c && free_load[l] > 0.0) {
        factor[l] = std::max(0.0, c - fixed[l]) / free_load[l];
      }
    }
    bool changed = false;
    for (std::size_t s = 0; s < net.num_sources(); ++s) {
      if (pinned[s]) continue;
      double f = 1.0;
      for (std::size_t p = net.pairs_begin(s); p < net.pairs_end(s); ++p) {
        f = std::min(f, factor[pairs[p].link]);
      }
      if (f >= 1.0) continue;
      x[s] *= f;
      if (x[s] <= net.source(s).x_min()) {
        x[s] = net.source(s).x_min();
        pinned[s] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }

  RepairedPoint out;
  std::vector<double> reliability(net.num_sources());
  const auto load = transmission_load(net, x, r);
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    const double c = net.link(l).capacity_max;
    if (load[l] - c > kFeasibilityTolerance * std::max(1.0, c)) out.feasible = false;
  }
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    reliability[s] = std::min(1.0, end_to_end_reliability_approx(net, r, s));
    if (reliability[s] < net.source(s).r_min() - kFeasibilityTolerance) out.feasible = false;
  }
  std::vector<double> shares;
  if (per_pair) {
    shares.resize(net.num_pairs());
    for (std::size_t l = 0; l < net.num_links(); ++l) {
      const auto& on = net.pairs_on(l);
      const double c = net.link(l).capacity_max;
      for (std::size_t p : on) {
        shares[p] = load[l] > 0.0
                        ? c * (x[pairs[p].source] / r.values[p]) / load[l]
                        : c / static_cast<double>(on.size());
      }
    }
  }
  out.utilities.resize(net.num_sources());
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    const auto& u = net.source(s).utility;
    // A path reliability that stayed non-positive is scored as (nearly) -infinity.
    out.utilities[s] = u.rate_value(x[s]) + u.reliability_value(std::max(reliability[s], 1e-300));
    out.total_utility += out.utilities[s];
  }
  out.allocation = FlowAllocation{std::move(x), std::move(reliability), std::move(r), std::move(shares)};
  return out;
}

}  // namespace rrnum

namespace rrnum {

// Feasible points beat infeasible ones, then higher utility wins.
inline bool better_point(const RepairedPoint& a, const RepairedPoint& b) {
  if (a.feasible != b.feasible) return a.feasible;
  return a.total_utility > b.total_utility;
}

// Running mean of a pair of vectors (primal iterates, or prices), restarted
// when the number of samples seen reaches a power of two so that early
// transients are forgotten.
class RunningAverage {
 public:
  void add(std::span<const double> first, std::span<const double> second) {
    ++seen_;
    if ((seen_ & (seen_ - 1)) == 0) {
      first_.assign(first.size(), 0.0);
      second_.assign(second.size(), 0.0);
      count_ = 0;
    }
    ++count_;
    const double w = 1.0 / static_cast<double>(count_);
    for (std::size_t i = 0; i < first.size(); ++i) first_[i] += w * (first[i] - first_[i]);
    for (std::size_t i = 0; i < second.size(); ++i) second_[i] += w * (second[i] - second_[i]);
  }

  std::size_t count() const noexcept { return count_; }
  const std::vector<double>& first() const noexcept { return first_; }
  const std::vector<double>& second() const noexcept { return second_; }

 private:
  std::vector<double> first_;
  std::vector<double> second_;
  std::size_t count_ = 0;
  std::size_t seen_ = 0;
};

}  // namespace rrnum
