#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rrnum/errors.hpp"

namespace rrnum {

struct Taylor2 {
  double value;
  double first;
  double second;
};

using Univariate = std::function<Taylor2(double)>;

// max sum_i f_i(z_{v_i})
// s.t. g_j(z) = b_j + sum_k a_jk z_k + sum_m h_jm(z_m) <= 0
//      lo <= z <= hi            (lo == hi fixes a variable)
// with concave f and convex h, all univariate.
struct SeparableProgram {
  struct Term {
    std::size_t var;
    Univariate fn;
  };
  struct Constraint {
    double constant = 0.0;
    std::vector<std::pair<std::size_t, double>> linear;
    std::vector<Term> convex;
    std::string label;
  };

  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<Term> objective;
  std::vector<Constraint> constraints;

  std::size_t add_variable(double l, double h) {
    lo.push_back(l);
    hi.push_back(h);
    return lo.size() - 1;
  }

  double objective_value(const std::vector<double>& z) const {
    double v = 0.0;
    for (const auto& t : objective) v += t.fn(z[t.var]).value;
    return v;
  }

  double constraint_value(std::size_t j, const std::vector<double>& z) const {
    const auto& c = constraints[j];
    double g = c.constant;
    for (const auto& [k, a] : c.linear) g += a * z[k];
    for (const auto& t : c.convex) g += t.fn(z[t.var]).value;
    return g;
  }
};

struct BarrierOptions {
  double t0 = 1.0;
  double growth = 20.0;
  double gap_tolerance = 1e-10;  // stop once m / t <= gap_tolerance * max(1, |objective|)
  double newton_tolerance = 1e-9;
  std::size_t max_newton_per_center = 200;
  std::size_t max_outer = 80;
};

struct BarrierResult {
  std::vector<double> z;
  double objective = 0.0;
  double gap_bound = std::numeric_limits<double>::infinity();  // m / t at the last center
  std::vector<double> multipliers;  // 1 / (t * -g_j) per constraint
  std::size_t newton_steps = 0;
  bool complete = false;
};

namespace detail {

class BarrierState {
 public:
  explicit BarrierState(const SeparableProgram& p) : p_(p) {
    for (std::size_t i = 0; i < p.lo.size(); ++i) {
      if (p.hi[i] < p.lo[i]) throw StructuralError("variable with empty range");
      if (p.hi[i] > p.lo[i]) {
        pos_.push_back(static_cast<long>(free_.size()));
        free_.push_back(i);
      } else {
        pos_.push_back(-1);
      }
    }
  }

  std::size_t num_free() const { return free_.size(); }

  std::size_t num_barrier_terms() const {
    std::size_t m = p_.constraints.size();
    for (std::size_t i : free_) {
      if (std::isfinite(p_.lo[i])) ++m;
      if (std::isfinite(p_.hi[i])) ++m;
    }
    return m;
  }

  bool strictly_feasible(const std::vector<double>& z) const {
    for (std::size_t i : free_) {
      if (!(z[i] > p_.lo[i]) || !(z[i] < p_.hi[i])) return false;
    }
    for (std::size_t j = 0; j < p_.constraints.size(); ++j) {
      if (!(p_.constraint_value(j, z) < 0.0)) return false;
    }
    return true;
  }

  // t * (-objective) - sum log(-g) - sum log(bound slacks); +inf outside.
  double phi(const std::vector<double>& z, double t) const {
    if (!strictly_feasible(z)) return std::numeric_limits<double>::infinity();
    double v = -t * p_.objective_value(z);
    for (std::size_t j = 0; j < p_.constraints.size(); ++j) v -= std::log(-p_.constraint_value(j, z));
    for (std::size_t i : free_) {
      if (std::isfinite(p_.lo[i])) v -= std::log(z[i] - p_.lo[i]);
      if (std::isfinite(p_.hi[i])) v -= std::log(p_.hi[i] - z[i]);
    }
    return v;
  }

  void derivatives(const std::vector<double>& z, double t, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hess) const {
    const long n = static_cast<long>(free_.size());
    grad.setZero(n);
    hess.setZero(n, n);
    for (const auto& term : p_.objective) {
      const long k = pos_[term.var];
      if (k < 0) continue;
      const auto d = term.fn(z[term.var]);
      grad(k) -= t * d.first;
      hess(k, k) -= t * d.second;
    }
    Eigen::VectorXd a(n);
    Eigen::VectorXd curv(n);
    for (const auto& c : p_.constraints) {
      double g = c.constant;
      a.setZero();
      curv.setZero();
      for (const auto& [var, coef] : c.linear) {
        g += coef * z[var];
        if (pos_[var] >= 0) a(pos_[var]) += coef;
      }
      for (const auto& term : c.convex) {
        const auto d = term.fn(z[term.var]);
        g += d.value;
        const long k = pos_[term.var];
        if (k < 0) continue;
        a(k) += d.first;
        curv(k) += d.second;
      }
      hess.diagonal() += curv / (-g);
      grad += a / (-g);
      hess.noalias() += (a * a.transpose()) / (g * g);
    }
    for (std::size_t idx = 0; idx < free_.size(); ++idx) {
      const std::size_t i = free_[idx];
      const long k = static_cast<long>(idx);
      if (std::isfinite(p_.lo[i])) {
        const double s = z[i] - p_.lo[i];
        grad(k) -= 1.0 / s;
        hess(k, k) += 1.0 / (s * s);
      }
      if (std::isfinite(p_.hi[i])) {
        const double s = p_.hi[i] - z[i];
        grad(k) += 1.0 / s;
        hess(k, k) += 1.0 / (s * s);
      }
    }
  }

  const std::vector<std::size_t>& free_vars() const { return free_; }

 private:
  const SeparableProgram& p_;
  std::vector<std::size_t> free_;
  std::vector<long> pos_;
};

}  // namespace detail

// Log-barrier interior-point method with damped Newton centering. z0 must be
// strictly feasible; fixed variables keep their value from z0.
inline BarrierResult solve_barrier(const SeparableProgram& prog, std::vector<double> z,
                                   const BarrierOptions& opt = {}) {
  detail::BarrierState st(prog);
  if (z.size() != prog.lo.size()) throw StructuralError("start point size mismatch");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (prog.lo[i] == prog.hi[i]) z[i] = prog.lo[i];
  }
  if (!st.strictly_feasible(z)) throw NumericalError("barrier start point is not strictly feasible");
  BarrierResult res;
  const double m = static_cast<double>(st.num_barrier_terms());
  const auto& free = st.free_vars();
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  std::vector<double> trial(z.size());
  double t = opt.t0;
  for (std::size_t outer = 0; outer < opt.max_outer; ++outer) {
    for (std::size_t it = 0; it < opt.max_newton_per_center && !free.empty(); ++it) {
      st.derivatives(z, t, grad, hess);
      Eigen::VectorXd step;
      double decrement = 0.0;
      double shift = 0.0;
      for (int attempt = 0; attempt < 30; ++attempt) {
        Eigen::MatrixXd h = hess;
        if (shift > 0.0) h.diagonal().array() += shift;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
        step = ldlt.solve(-grad);
        decrement = -grad.dot(step);
        if (ldlt.info() == Eigen::Success && step.allFinite() && decrement > 0.0) break;
        shift = shift == 0.0 ? 1e-8 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff())
                             : shift * 10.0;
        decrement = 0.0;
      }
      ++res.newton_steps;
      if (!(decrement > 0.0) || 0.5 * decrement <= opt.newton_tolerance) break;
      const double phi0 = st.phi(z, t);
      double s = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 80; ++ls, s *= 0.5) {
        trial = z;
        for (std::size_t k = 0; k < free.size(); ++k) trial[free[k]] += s * step(static_cast<long>(k));
        const double phi1 = st.phi(trial, t);
        if (phi1 < phi0 && phi1 <= phi0 - 0.25 * s * decrement) {
          moved = true;
          break;
        }
      }
      if (!moved) break;
      z.swap(trial);
    }
    res.objective = prog.objective_value(z);
    res.gap_bound = m / t;
    if (res.gap_bound <= opt.gap_tolerance * std::max(1.0, std::abs(res.objective))) {
      res.complete = true;
      break;
    }
    t *= opt.growth;
  }
  res.multipliers.resize(prog.constraints.size());
  for (std::size_t j = 0; j < prog.constraints.size(); ++j) {
    res.multipliers[j] = 1.0 / (t * -prog.constraint_value(j, z));
  }
  res.z = std::move(z);
  return res;
}

}  // namespace rrnum
