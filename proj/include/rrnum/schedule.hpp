#pragma once

#include <cstddef>
#include <string>

#include "rrnum/errors.hpp"

namespace rrnum {

struct StepSchedule {
  enum class Kind { diminishing, constant };
  Kind kind = Kind::constant;
  double beta0 = 0.01;

  double at(std::size_t t) const {
    if (t < 1) throw DomainError("iteration index starts at 1");
    return kind == Kind::constant ? beta0 : beta0 / static_cast<double>(t);
  }

  static StepSchedule constant(double beta0) { return checked(Kind::constant, beta0); }
  static StepSchedule diminishing(double beta0) { return checked(Kind::diminishing, beta0); }

 private:
  static StepSchedule checked(Kind k, double beta0) {
    if (!(beta0 > 0.0)) throw DomainError("step size beta0 must be positive");
    return {k, beta0};
  }
};

inline const char* schedule_name(StepSchedule::Kind k) {
  return k == StepSchedule::Kind::constant ? "constant" : "diminishing";
}

inline StepSchedule::Kind parse_schedule(const std::string& s) {
  if (s == "constant") return StepSchedule::Kind::constant;
  if (s == "diminishing") return StepSchedule::Kind::diminishing;
  throw ValidationError("unknown step schedule '" + s + "'");
}

struct StopCriteria {
  std::size_t max_iterations = 20000;
  // Infinity norm of the price change divided by beta(t) / beta0, so that a
  // shrinking step does not by itself look like convergence.
  double price_tolerance = 1e-6;
  // (dual value - repaired primal value) / max(1, |primal value|)
  double gap_tolerance = 1e-4;
};

struct SolverOptions {
  StepSchedule schedule;
  StopCriteria stop;
  double initial_lambda = 1.0;
  double initial_mu = 1.0;
  // Start each reliability price at dU_s/dR_s evaluated at R_s = 1 instead of
  // initial_mu. Source-local and much better conditioned.
  bool mu_from_marginal_utility = true;
  // Repair the iterate and test the duality gap every k-th iteration.
  std::size_t check_interval = 10;
  bool strict = true;
  bool record_trace = true;
  std::size_t trace_stride = 1;  // keep every k-th iteration (plus the last)
};

}  // namespace rrnum
