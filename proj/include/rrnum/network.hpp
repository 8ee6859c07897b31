#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "rrnum/error_model.hpp"
#include "rrnum/errors.hpp"
#include "rrnum/utility.hpp"

namespace rrnum {

struct LinkSpec {
  std::string name;
  double capacity_max = 0.0;  // C_l^max, transmission rate units
  ErrorModel error_model = ErrorModel::exponential(100.0, 1.0);
};

struct SourceSpec {
  std::string name;
  std::vector<std::size_t> route;  // link indices L(s), in path order
  Utility utility = Utility::alpha_fair(UtilityParams{});

  double x_min() const noexcept { return utility.params().x_min; }
  double x_max() const noexcept { return utility.params().x_max; }
  double r_min() const noexcept { return utility.params().r_min; }
};

// Convenience constructor for the built-in alpha-fair family.
inline SourceSpec make_source(std::string name, std::vector<std::size_t> route,
                              const UtilityParams& params) {
  return SourceSpec{std::move(name), std::move(route), Utility::alpha_fair(params)};
}

// A (link, source) pair with s in S(l). Pairs are enumerated source by source
// in route order, so the pairs of one source are contiguous.
struct LinkSourcePair {
  std::size_t link;
  std::size_t source;
};

class NetworkSpec {
 public:
  NetworkSpec() = default;

  NetworkSpec(std::vector<LinkSpec> links, std::vector<SourceSpec> sources)
      : links_(std::move(links)), sources_(std::move(sources)) {
    if (sources_.empty()) throw ValidationError("network has no sources");
    if (links_.empty()) throw ValidationError("network has no links");
    for (std::size_t l = 0; l < links_.size(); ++l) {
      if (!(links_[l].capacity_max > 0.0) || !std::isfinite(links_[l].capacity_max)) {
        throw ValidationError("link " + label_link(l) + ": capacity must be positive");
      }
    }
    by_link_.assign(links_.size(), {});
    pairs_by_link_.assign(links_.size(), {});
    for (std::size_t s = 0; s < sources_.size(); ++s) {
      const auto& route = sources_[s].route;
      if (route.empty()) throw ValidationError("source " + label_source(s) + ": empty route");
      first_pair_.push_back(pairs_.size());
      for (std::size_t i = 0; i < route.size(); ++i) {
        const std::size_t l = route[i];
        if (l >= links_.size()) {
          throw ValidationError("source " + label_source(s) + ": route references unknown link index " +
                                std::to_string(l));
        }
        if (std::find(route.begin(), route.begin() + static_cast<std::ptrdiff_t>(i), l) !=
            route.begin() + static_cast<std::ptrdiff_t>(i)) {
          throw ValidationError("source " + label_source(s) + ": route visits link " +
                                label_link(l) + " twice");
        }
        by_link_[l].push_back(s);
        pairs_by_link_[l].push_back(pairs_.size());
        pairs_.push_back({l, s});
      }
    }
    first_pair_.push_back(pairs_.size());
    for (std::size_t l = 0; l < links_.size(); ++l) {
      if (by_link_[l].empty()) warnings_.push_back("link " + label_link(l) + " carries no sources");
    }
  }

  std::size_t num_links() const noexcept { return links_.size(); }
  std::size_t num_sources() const noexcept { return sources_.size(); }
  std::size_t num_pairs() const noexcept { return pairs_.size(); }

  const std::vector<LinkSpec>& links() const noexcept { return links_; }
  const std::vector<SourceSpec>& sources() const noexcept { return sources_; }
  const LinkSpec& link(std::size_t l) const { return links_.at(l); }
  const SourceSpec& source(std::size_t s) const { return sources_.at(s); }

  // S(l)
  const std::vector<std::size_t>& sources_on(std::size_t l) const { return by_link_.at(l); }

  const std::vector<LinkSourcePair>& pairs() const noexcept { return pairs_; }
  // Pair indices (l, s) for l in L(s), in route order.
  std::size_t pairs_begin(std::size_t s) const { return first_pair_.at(s); }
  std::size_t pairs_end(std::size_t s) const { return first_pair_.at(s + 1); }
  // Pair indices (l, s) for s in S(l), in source order.
  const std::vector<std::size_t>& pairs_on(std::size_t l) const { return pairs_by_link_.at(l); }

  std::size_t pair_index(std::size_t l, std::size_t s) const {
    for (std::size_t p = pairs_begin(s); p < pairs_end(s); ++p) {
      if (pairs_[p].link == l) return p;
    }
    throw StructuralError("source " + label_source(s) + " does not traverse link " + label_link(l));
  }

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  std::string label_link(std::size_t l) const {
    if (l < links_.size() && !links_[l].name.empty()) return links_[l].name;
    return "#" + std::to_string(l + 1);
  }
  std::string label_source(std::size_t s) const {
    if (s < sources_.size() && !sources_[s].name.empty()) return sources_[s].name;
    return "#" + std::to_string(s + 1);
  }

  // Copy with every source's alpha-fair weight replaced.
  NetworkSpec with_weights(std::span<const double> weights) const {
    if (weights.size() != sources_.size()) throw StructuralError("weight vector size mismatch");
    auto sources = sources_;
    for (std::size_t s = 0; s < sources.size(); ++s) {
      if (!sources[s].utility.is_alpha_fair()) {
        throw ValidationError("source " + label_source(s) + ": weights only apply to alpha-fair utilities");
      }
      auto p = sources[s].utility.params();
      p.a = weights[s];
      sources[s].utility = Utility::alpha_fair(p);
    }
    return NetworkSpec(links_, std::move(sources));
  }

 private:
  std::vector<LinkSpec> links_;
  std::vector<SourceSpec> sources_;
  std::vector<std::vector<std::size_t>> by_link_;
  std::vector<std::vector<std::size_t>> pairs_by_link_;
  std::vector<LinkSourcePair> pairs_;
  std::vector<std::size_t> first_pair_;
  std::vector<std::string> warnings_;
};

// Code rates either shared per link (integrated policy) or per (link, source)
// pair (differentiated policy).
struct CodeRates {
  enum class Layout { per_link, per_pair };
  Layout layout = Layout::per_link;
  std::vector<double> values;

  static CodeRates per_link(std::vector<double> v) { return {Layout::per_link, std::move(v)}; }
  static CodeRates per_pair(std::vector<double> v) { return {Layout::per_pair, std::move(v)}; }

  double at(const NetworkSpec& net, std::size_t p) const {
    const std::size_t idx = layout == Layout::per_link ? net.pairs()[p].link : p;
    if (idx >= values.size() || std::isnan(values[idx])) {
      throw StructuralError("no code rate for link " + net.label_link(net.pairs()[p].link) +
                            " on the route of source " + net.label_source(net.pairs()[p].source));
    }
    return values[idx];
  }
};

struct FlowAllocation {
  std::vector<double> x;            // information rate per source
  std::vector<double> reliability;  // R_s per source
  CodeRates code_rates;
  std::vector<double> shares;  // c_{l,s} per pair; empty for the integrated policy
};

// 1 - sum_{l in L(s)} E_l(r_{l,s}); returned unclamped.
inline double end_to_end_reliability_approx(const NetworkSpec& net, const CodeRates& r,
                                            std::size_t s) {
  double sum = 0.0;
  for (std::size_t p = net.pairs_begin(s); p < net.pairs_end(s); ++p) {
    sum += net.link(net.pairs()[p].link).error_model(r.at(net, p));
  }
  return 1.0 - sum;
}

// prod_{l in L(s)} (1 - E_l(r_{l,s})), the product form before the small-error
// approximation.
inline double end_to_end_reliability_exact(const NetworkSpec& net, const CodeRates& r,
                                           std::size_t s) {
  double prod = 1.0;
  for (std::size_t p = net.pairs_begin(s); p < net.pairs_end(s); ++p) {
    prod *= 1.0 - net.link(net.pairs()[p].link).error_model(r.at(net, p));
  }
  return prod;
}

struct CapacityReport {
  std::vector<double> slack;  // C_l^max - sum_s x_s / r_{l,s}
  bool feasible = true;
};

inline CapacityReport check_capacity_feasible(const NetworkSpec& net, const FlowAllocation& alloc,
                                              double tol) {
  if (alloc.x.size() != net.num_sources()) throw StructuralError("rate vector size mismatch");
  CapacityReport report;
  report.slack.resize(net.num_links());
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    double load = 0.0;
    for (std::size_t p : net.pairs_on(l)) {
      const double x = alloc.x[net.pairs()[p].source];
      const double r = alloc.code_rates.at(net, p);
      if (x == 0.0) continue;
      if (r <= 0.0) {
        load = std::numeric_limits<double>::infinity();
        break;
      }
      load += x / r;
    }
    report.slack[l] = net.link(l).capacity_max - load;
    if (report.slack[l] < -tol) report.feasible = false;
  }
  return report;
}

}  // namespace rrnum
