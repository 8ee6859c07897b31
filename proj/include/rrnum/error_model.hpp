#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>

#include "rrnum/errors.hpp"

namespace rrnum {

// User-supplied error exponent E0(r) with its first two derivatives. The link
// error is then exp(-N * E0(r)).
struct ExponentFunction {
  std::function<double(double)> value;
  std::function<double(double)> first;
  std::function<double(double)> second;
};

// Per-link decoding-error function E_l(r) of the code rate r in [0, 1].
//
//   binary       E(r) = 1/2 * 2^(-N (R0 - r))        random coding, M-ary binary signals
//   exponential  E(r) = 1/2 * exp(-N (R0 - r))       base-e variant
//   quadratic    E(r) = exp(-N kappa (R0 - r)^2)     built-in general-exponent model
//   general      E(r) = exp(-N E0(r))                caller-provided E0, E0', E0''
//
// Every kind is expressed through an exponent E0 so that E = exp(-N E0) and
//   E'  = -N E0' E
//   E'' =  N E (N E0'^2 - E0'').
class ErrorModel {
 public:
  enum class Kind { binary, exponential, quadratic, general };

  static ErrorModel binary(double block_length, double cutoff_rate) {
    check_block_length(block_length);
    return ErrorModel(Kind::binary, block_length, cutoff_rate, 0.0, nullptr);
  }

  static ErrorModel exponential(double block_length, double cutoff_rate) {
    check_block_length(block_length);
    return ErrorModel(Kind::exponential, block_length, cutoff_rate, 0.0, nullptr);
  }

  // R0 > 1 keeps |E0'| bounded away from zero on [0, 1].
  static ErrorModel quadratic(double block_length, double kappa, double cutoff_rate) {
    check_block_length(block_length);
    if (!(kappa > 0.0)) throw DomainError("quadratic exponent needs kappa > 0");
    if (!(cutoff_rate > 1.0)) {
      throw DomainError("quadratic exponent needs R0 > 1 so that E0' stays away from zero on [0,1]");
    }
    return ErrorModel(Kind::quadratic, block_length, cutoff_rate, kappa, nullptr);
  }

  static ErrorModel general(double block_length, ExponentFunction exponent) {
    check_block_length(block_length);
    if (!exponent.value || !exponent.first || !exponent.second) {
      throw DomainError("general error model needs E0, E0' and E0''");
    }
    return ErrorModel(Kind::general, block_length, std::numeric_limits<double>::quiet_NaN(), 0.0,
                      std::make_shared<const ExponentFunction>(std::move(exponent)));
  }

  Kind kind() const noexcept { return kind_; }
  double block_length() const noexcept { return block_length_; }
  double cutoff_rate() const noexcept { return cutoff_rate_; }
  double kappa() const noexcept { return kappa_; }

  double exponent(double r) const {
    switch (kind_) {
      case Kind::binary:
        return (cutoff_rate_ - r) * std::numbers::ln2 + std::numbers::ln2 / block_length_;
      case Kind::exponential:
        return (cutoff_rate_ - r) + std::numbers::ln2 / block_length_;
      case Kind::quadratic:
        return kappa_ * (cutoff_rate_ - r) * (cutoff_rate_ - r);
      case Kind::general:
        return custom_->value(r);
    }
    return 0.0;
  }

  double exponent_first(double r) const {
    switch (kind_) {
      case Kind::binary: return -std::numbers::ln2;
      case Kind::exponential: return -1.0;
      case Kind::quadratic: return -2.0 * kappa_ * (cutoff_rate_ - r);
      case Kind::general: return custom_->first(r);
    }
    return 0.0;
  }

  double exponent_second(double r) const {
    switch (kind_) {
      case Kind::binary:
      case Kind::exponential: return 0.0;
      case Kind::quadratic: return 2.0 * kappa_;
      case Kind::general: return custom_->second(r);
    }
    return 0.0;
  }

  // Checked evaluation; r must lie in [0, 1].
  double operator()(double r) const {
    check_rate(r);
    return value(r);
  }

  // The unchecked accessors below are used by the solvers, which only ever
  // evaluate inside [0, 1].
  double value(double r) const {
    switch (kind_) {
      case Kind::binary: return 0.5 * std::exp2(-block_length_ * (cutoff_rate_ - r));
      case Kind::exponential: return 0.5 * std::exp(-block_length_ * (cutoff_rate_ - r));
      default: return std::exp(-block_length_ * exponent(r));
    }
  }

  double derivative(double r) const { return -block_length_ * exponent_first(r) * value(r); }

  double second_derivative(double r) const {
    const double d1 = exponent_first(r);
    return block_length_ * value(r) * (block_length_ * d1 * d1 - exponent_second(r));
  }

  // Code rate r in [0, 1] with E(r) = p, clipped to the end points when p is
  // outside [E(0), E(1)].
  double inverse(double p) const {
    if (!(p > 0.0)) throw DomainError("error probability must be positive to invert");
    const double lo_val = value(0.0);
    const double hi_val = value(1.0);
    if (p <= lo_val) return 0.0;
    if (p >= hi_val) return 1.0;
    switch (kind_) {
      case Kind::binary: return cutoff_rate_ + std::log2(2.0 * p) / block_length_;
      case Kind::exponential: return cutoff_rate_ + std::log(2.0 * p) / block_length_;
      default: break;
    }
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (value(mid) < p) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(12);
    switch (kind_) {
      case Kind::binary: os << "binary N=" << block_length_ << " R0=" << cutoff_rate_; break;
      case Kind::exponential: os << "exponential N=" << block_length_ << " R0=" << cutoff_rate_; break;
      case Kind::quadratic:
        os << "quadratic N=" << block_length_ << " kappa=" << kappa_ << " R0=" << cutoff_rate_;
        break;
      case Kind::general: os << "general N=" << block_length_; break;
    }
    return os.str();
  }

 private:
  ErrorModel(Kind kind, double n, double r0, double kappa,
             std::shared_ptr<const ExponentFunction> custom)
      : kind_(kind), block_length_(n), cutoff_rate_(r0), kappa_(kappa), custom_(std::move(custom)) {}

  static void check_block_length(double n) {
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("block length N must be positive");
  }

  static void check_rate(double r) {
    if (!(r >= 0.0 && r <= 1.0)) {
      std::ostringstream os;
      os << "code rate " << r << " outside [0, 1]";
      throw DomainError(os.str());
    }
  }

  Kind kind_;
  double block_length_;
  double cutoff_rate_;
  double kappa_;
  std::shared_ptr<const ExponentFunction> custom_;
};

// eval_link_error
inline double link_error(const ErrorModel& model, double r) { return model(r); }

}  // namespace rrnum
