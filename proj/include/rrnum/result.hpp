#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rrnum/network.hpp"
#include "rrnum/validation.hpp"

namespace rrnum {

// One recorded iteration. For the integrated policy code_rates holds r_l per
// link and lambda one price per link; for the differentiated policy both are
// per (link, source) pair in NetworkSpec::pairs() order and shares holds c.
struct TraceRecord {
  std::size_t t = 0;
  double step = 0.0;
  std::vector<double> x;  // information rates (original coordinates)
  std::vector<double> reliability;
  std::vector<double> code_rates;
  std::vector<double> shares;
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<double> capacity_residual;     // r_l C_l - x^l, or log c + log r - x' per pair
  std::vector<double> reliability_residual;  // R^s - R_s
  double utility = 0.0;                      // sum_s U_s at the raw iterate
  double dual_value = 0.0;
  double repaired_utility = 0.0;
};

struct IterationTrace {
  Policy policy = Policy::integrated;
  std::vector<TraceRecord> records;
};

struct SolveResult {
  Policy policy = Policy::integrated;
  FlowAllocation allocation;        // repaired, original coordinates
  std::vector<double> utilities;    // U_s at the reported point
  double total_utility = 0.0;
  std::vector<double> lambda;       // prices attaining best_dual_value
  std::vector<double> mu;
  double dual_value = 0.0;          // at the prices of the last iteration
  double best_dual_value = 0.0;     // smallest dual value seen
  double relative_gap = 0.0;        // (best dual - total) / max(1, |total|)
  bool converged = false;
  bool feasible = true;
  std::string stop_reason;
  std::size_t iterations = 0;
  double max_lambda_slackness = 0.0;  // max |lambda * capacity residual| at the reported point
  double max_mu_slackness = 0.0;      // max |mu * reliability residual|
  std::vector<std::string> warnings;
};

}  // namespace rrnum
