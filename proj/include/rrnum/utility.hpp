#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <string>

#include "rrnum/errors.hpp"

namespace rrnum {

// Parameters of the normalized alpha-fair utility
//
//   U(x, R) = a * (phi(x) - phi(x_min)) / (phi(x_max) - phi(x_min))
//           + (1 - a) * (phi(R) - phi(R_min)) / (phi(1) - phi(R_min))
//
// with phi(z) = z^(1 - alpha), or log z when alpha = 1. The upper
// reliability bound is fixed at 1.
struct UtilityParams {
  double a = 0.5;
  double alpha = 1.1;
  double x_min = 0.1;
  double x_max = 2.0;
  double r_min = 0.9;
};

// One separable component of a utility: value and first two derivatives.
struct UtilityComponent {
  std::function<double(double)> value;
  std::function<double(double)> first;
  std::function<double(double)> second;
};

struct UtilityPoint {
  double value;
  double d_rate;
  double d_reliability;
};

// Separable utility U(x, R) = U^x(x) + U^R(R), strictly increasing and concave
// on the box [x_min, x_max] x [R_min, 1].
class Utility {
 public:
  static Utility alpha_fair(const UtilityParams& p) {
    if (!(p.a >= 0.0 && p.a <= 1.0)) throw DomainError("utility weight a must lie in [0, 1]");
    if (!(p.alpha > 0.0)) throw DomainError("fairness exponent alpha must be positive");
    if (!(p.x_min > 0.0 && p.x_min < p.x_max)) {
      throw DomainError("alpha-fair utility needs 0 < x_min < x_max");
    }
    if (!(p.r_min >= 0.0 && p.r_min < 1.0)) throw DomainError("R_min must lie in [0, 1)");
    if (p.r_min == 0.0 && p.alpha >= 1.0) {
      throw DomainError("normalized reliability term is unbounded at R_min = 0 for alpha >= 1");
    }
    Utility u;
    u.params_ = p;
    u.rate_span_ = phi(p.x_max, p.alpha) - phi(p.x_min, p.alpha);
    u.rel_span_ = phi(1.0, p.alpha) - phi(p.r_min, p.alpha);
    return u;
  }

  // Caller-supplied components; `bounds.a` and `bounds.alpha` are kept only for
  // reporting.
  static Utility custom(const UtilityParams& bounds, UtilityComponent rate,
                        UtilityComponent reliability) {
    if (!(bounds.x_min > 0.0 && bounds.x_min <= bounds.x_max)) {
      throw DomainError("custom utility needs 0 < x_min <= x_max");
    }
    if (!rate.value || !rate.first || !rate.second || !reliability.value || !reliability.first ||
        !reliability.second) {
      throw DomainError("custom utility needs value and two derivatives for both components");
    }
    Utility u;
    u.params_ = bounds;
    u.custom_ = std::make_shared<const Parts>(Parts{std::move(rate), std::move(reliability)});
    return u;
  }

  const UtilityParams& params() const noexcept { return params_; }
  bool is_alpha_fair() const noexcept { return custom_ == nullptr; }

  // Checked evaluation: value plus both partial derivatives.
  UtilityPoint evaluate(double x, double reliability) const {
    check_box(x, reliability);
    return {rate_value(x) + reliability_value(reliability), rate_first(x),
            reliability_first(reliability)};
  }

  double operator()(double x, double reliability) const { return evaluate(x, reliability).value; }

  double rate_value(double x) const {
    if (custom_) return custom_->rate.value(x);
    return params_.a * (phi(x, params_.alpha) - phi(params_.x_min, params_.alpha)) / rate_span_;
  }
  double rate_first(double x) const {
    if (custom_) return custom_->rate.first(x);
    return params_.a * phi1(x, params_.alpha) / rate_span_;
  }
  double rate_second(double x) const {
    if (custom_) return custom_->rate.second(x);
    return params_.a * phi2(x, params_.alpha) / rate_span_;
  }

  double reliability_value(double r) const {
    if (custom_) return custom_->reliability.value(r);
    return (1.0 - params_.a) * (phi(r, params_.alpha) - phi(params_.r_min, params_.alpha)) /
           rel_span_;
  }
  double reliability_first(double r) const {
    if (custom_) return custom_->reliability.first(r);
    return (1.0 - params_.a) * phi1(r, params_.alpha) / rel_span_;
  }
  double reliability_second(double r) const {
    if (custom_) return custom_->reliability.second(r);
    return (1.0 - params_.a) * phi2(r, params_.alpha) / rel_span_;
  }

  // Rate component in log coordinates: U^x'(y) = U^x(e^y).
  double log_rate_value(double y) const { return rate_value(std::exp(y)); }
  double log_rate_first(double y) const {
    const double x = std::exp(y);
    return rate_first(x) * x;
  }
  double log_rate_second(double y) const {
    const double x = std::exp(y);
    return x * (rate_second(x) * x + rate_first(x));
  }

  // g(x) = U^x''(x) x + U^x'(x); U^x(e^y) is concave in y wherever g <= 0.
  double elasticity_margin(double x) const { return rate_second(x) * x + rate_first(x); }

  std::string describe() const {
    std::ostringstream os;
    os.precision(12);
    if (custom_) {
      os << "custom";
    } else {
      os << "alpha_fair a=" << params_.a << " alpha=" << params_.alpha;
    }
    return os.str();
  }

 private:
  struct Parts {
    UtilityComponent rate;
    UtilityComponent reliability;
  };

  Utility() = default;

  static double phi(double z, double alpha) {
    return alpha == 1.0 ? std::log(z) : std::pow(z, 1.0 - alpha);
  }
  static double phi1(double z, double alpha) {
    return alpha == 1.0 ? 1.0 / z : (1.0 - alpha) * std::pow(z, -alpha);
  }
  static double phi2(double z, double alpha) {
    return alpha == 1.0 ? -1.0 / (z * z) : -alpha * (1.0 - alpha) * std::pow(z, -alpha - 1.0);
  }

  void check_box(double x, double r) const {
    constexpr double slack = 1e-12;
    const bool x_ok = x >= params_.x_min * (1.0 - slack) && x <= params_.x_max * (1.0 + slack);
    const bool r_ok = r >= params_.r_min - slack && r <= 1.0 + slack;
    if (!x_ok || !r_ok) {
      std::ostringstream os;
      os << "utility argument (" << x << ", " << r << ") outside [" << params_.x_min << ", "
         << params_.x_max << "] x [" << params_.r_min << ", 1]";
      throw DomainError(os.str());
    }
  }

  UtilityParams params_{};
  double rate_span_ = 1.0;
  double rel_span_ = 1.0;
  std::shared_ptr<const Parts> custom_;
};

// eval_utility
inline UtilityPoint eval_utility(const Utility& u, double x, double reliability) {
  return u.evaluate(x, reliability);
}

}  // namespace rrnum
