#pragma once

#include <string>
#include <vector>

#include "rrnum/errors.hpp"
#include "rrnum/lemmas.hpp"
#include "rrnum/network.hpp"

namespace rrnum {

enum class Policy { static_reliability, integrated, differentiated };

inline const char* policy_name(Policy p) {
  switch (p) {
    case Policy::static_reliability: return "static";
    case Policy::integrated: return "integrated";
    case Policy::differentiated: return "differentiated";
  }
  return "?";
}

inline Policy parse_policy(const std::string& s) {
  if (s == "static") return Policy::static_reliability;
  if (s == "integrated") return Policy::integrated;
  if (s == "differentiated") return Policy::differentiated;
  throw ValidationError("unknown policy '" + s + "'");
}

struct ValidationReport {
  std::vector<Lemma1Report> links;
  std::vector<Lemma2Report> sources;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return errors.empty(); }
};

// Convexity of every E_l (needed by both dynamic policies) and, when asked,
// log-concavity of every rate utility (needed by the differentiated policy).
// A link whose block length is below the sufficient bound but whose error
// function is convex on the grid only earns a warning.
inline ValidationReport validate_network(const NetworkSpec& net, bool check_rate_elasticity) {
  ValidationReport report;
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    auto r = check_lemma1(net.link(l).error_model);
    const std::string who = "link " + net.label_link(l);
    if (!r.grid_convex) {
      report.errors.push_back(who + ": error function is not convex in the code rate near r = " +
                              std::to_string(r.scan.worst_rate) + " (Lemma 1 fails, N = " +
                              std::to_string(net.link(l).error_model.block_length()) +
                              ", sufficient N > " + std::to_string(r.minimum_n) + ")");
    } else if (!r.holds_for_n) {
      report.warnings.push_back(who + ": N below the Lemma 1 bound " + std::to_string(r.minimum_n) +
                                " but the error function is convex on the grid");
    }
    report.links.push_back(r);
  }
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    auto r = check_lemma2(net.source(s).utility);
    if (check_rate_elasticity && !r.holds) {
      report.errors.push_back("source " + net.label_source(s) +
                              ": rate utility is not concave in log rate (Lemma 2 fails at x = " +
                              std::to_string(r.worst_x) + ")");
    }
    report.sources.push_back(r);
  }
  for (const auto& w : net.warnings()) report.warnings.push_back(w);
  return report;
}

// Strict mode turns validation errors into an exception; permissive mode
// demotes them to warnings.
inline ValidationReport enforce_validation(const NetworkSpec& net, bool check_rate_elasticity,
                                           bool strict) {
  auto report = validate_network(net, check_rate_elasticity);
  if (report.ok()) return report;
  if (strict) {
    std::string msg;
    for (const auto& e : report.errors) msg += (msg.empty() ? "" : "; ") + e;
    throw ValidationError(msg);
  }
  for (auto& e : report.errors) report.warnings.push_back(e + " [permissive: convergence guarantee void]");
  report.errors.clear();
  return report;
}

}  // namespace rrnum
