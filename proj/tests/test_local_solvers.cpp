#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "rrnum/rrnum.hpp"

using namespace rrnum;

namespace {

const UtilityParams kDefaultUser{0.5, 1.1, 0.1, 2.0, 0.9};

double source_objective(const Utility& u, double x, double r, double lam, double mu) {
  return u.rate_value(x) + u.reliability_value(r) - lam * x - mu * r;
}

double source_log_objective(const Utility& u, double y, double r, double lam, double mu) {
  return u.log_rate_value(y) + u.reliability_value(r) - lam * y - mu * r;
}

double link_objective(const ErrorModel& m, double r, double lam, double mu, double cap) {
  return lam * r * cap - mu * m.value(r);
}

}  // namespace

TEST(ScalarSolve, Examples) {
  EXPECT_NEAR(solve_scalar_concave({[](double x) { return -x; }, -1.0, 2.0}), 0.0, 1e-9);
  EXPECT_DOUBLE_EQ(solve_scalar_concave({[](double) { return 1.0; }, 0.0, 1.0}), 1.0);
  EXPECT_NEAR(solve_scalar_concave({[](double x) { return 1 - 2 * x; }, 0.0, 1.0}), 0.5, 1e-10);
  EXPECT_DOUBLE_EQ(solve_scalar_concave({[](double) { return -3.0; }, 0.0, 1.0}), 0.0);
}

TEST(ScalarSolve, ZeroDerivativeReturnsMidpoint) {
  EXPECT_DOUBLE_EQ(solve_scalar_concave({[](double) { return 0.0; }, 1.0, 3.0}), 2.0);
}

TEST(ScalarSolve, NonFiniteDerivativeNamesThePoint) {
  try {
    solve_scalar_concave({[](double x) { return x > 0.3 ? std::nan("") : 1.0; }, 0.0, 1.0});
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("at 1"), std::string::npos) << e.what();
  }
}

TEST(ScalarSolve, MonotonicityCheck) {
  EXPECT_TRUE(derivative_nonincreasing([](double x) { return 1 - x * x * x; }, 0.0, 2.0));
  EXPECT_FALSE(derivative_nonincreasing([](double x) { return std::sin(6 * x); }, 0.0, 2.0));
}

TEST(SourceIntegrated, Corners) {
  const auto u = Utility::alpha_fair(kDefaultUser);
  const auto free = solve_source_integrated(u, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(free.rate, 2.0);
  EXPECT_DOUBLE_EQ(free.reliability, 1.0);
  const auto priced = solve_source_integrated(u, 1e6, 1e6);
  EXPECT_DOUBLE_EQ(priced.rate, 0.1);
  EXPECT_DOUBLE_EQ(priced.reliability, 0.9);
  EXPECT_THROW(solve_source_integrated(u, -0.1, 0.0), DomainError);
}

TEST(SourceIntegrated, InteriorPointMatchesGridSearch) {
  const auto u = Utility::alpha_fair(kDefaultUser);
  const double lam = 0.3;
  const double mu = 0.4;
  const auto resp = solve_source_integrated(u, lam, mu);
  EXPECT_NEAR(u.rate_first(resp.rate), lam, 1e-8);
  // dU/dR at R = 1 is about 4.72 > mu, so the reliability sits on its upper bound.
  EXPECT_DOUBLE_EQ(resp.reliability, 1.0);
  EXPECT_GT(u.reliability_first(1.0), mu);
  // The objective is separable, so the 2-D grid search splits into two 1-D scans.
  double best_x = 0.0;
  double best_fx = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 19000; ++i) {
    const double x = 0.1 + i * 1e-4;
    const double f = u.rate_value(x) - lam * x;
    if (f > best_fx) {
      best_fx = f;
      best_x = x;
    }
  }
  double best_r = 0.0;
  double best_fr = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 1000; ++i) {
    const double r = 0.9 + i * 1e-4;
    const double f = u.reliability_value(r) - mu * r;
    if (f > best_fr) {
      best_fr = f;
      best_r = r;
    }
  }
  EXPECT_NEAR(resp.rate, best_x, 1e-4);
  EXPECT_NEAR(resp.reliability, best_r, 1e-4);
  EXPECT_GE(resp.value, best_fx + best_fr - 1e-12);
}

TEST(SourceIntegrated, EqualsTwoScalarSolves) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> price(0.0, 2.0);
  const auto u = Utility::alpha_fair(kDefaultUser);
  for (int i = 0; i < 200; ++i) {
    const double lam = price(rng);
    const double mu = price(rng);
    const auto resp = solve_source_integrated(u, lam, mu);
    const double x = solve_scalar_concave({[&](double v) { return u.rate_first(v) - lam; }, 0.1, 2.0});
    const double r =
        solve_scalar_concave({[&](double v) { return u.reliability_first(v) - mu; }, 0.9, 1.0});
    EXPECT_DOUBLE_EQ(resp.rate, x);
    EXPECT_DOUBLE_EQ(resp.reliability, r);
  }
}

TEST(SourceIntegrated, DemandIsMonotone) {
  const auto u = Utility::alpha_fair(kDefaultUser);
  double prev_x = std::numeric_limits<double>::infinity();
  double prev_r = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 400; ++i) {
    const double p = i * 0.01;
    const auto resp = solve_source_integrated(u, p, p);
    EXPECT_LE(resp.rate, prev_x + 1e-12);
    EXPECT_LE(resp.reliability, prev_r + 1e-12);
    prev_x = resp.rate;
    prev_r = resp.reliability;
  }
}

TEST(LinkIntegrated, Corners) {
  const auto m = ErrorModel::binary(100, 1.0);
  EXPECT_DOUBLE_EQ(solve_link_integrated(m, 1.0, 0.0, 2.0).code_rate, 1.0);
  EXPECT_DOUBLE_EQ(solve_link_integrated(m, 0.0, 1.0, 2.0).code_rate, 0.0);
  EXPECT_DOUBLE_EQ(solve_link_integrated(m, 0.0, 1.0, 2.0, 0.3).code_rate, 0.3);
  EXPECT_THROW(solve_link_integrated(m, -1.0, 1.0, 2.0), DomainError);
}

TEST(LinkIntegrated, BinaryClosedForm) {
  const auto m = ErrorModel::binary(100, 1.0);
  const double lam = 1.0;
  const double mu = 1.0;
  const double cap = 2.0;
  const double closed =
      std::clamp(1.0 + std::log2(2 * lam * cap / (mu * 100 * std::numbers::ln2)) / 100, 0.0, 1.0);
  const double r = solve_link_integrated(m, lam, mu, cap).code_rate;
  EXPECT_NEAR(r, closed, 1e-9);
  // Independent bisection on the stationarity condition.
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (lam * cap - mu * 100 * std::numbers::ln2 * 0.5 * std::exp2(-100 * (1 - mid)) > 0) lo = mid;
    else hi = mid;
  }
  EXPECT_NEAR(r, lo, 1e-9);
  double best = 0.0;
  double best_f = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 1000000; ++i) {
    const double v = i * 1e-6;
    const double f = link_objective(m, v, lam, mu, cap);
    if (f > best_f) {
      best_f = f;
      best = v;
    }
  }
  EXPECT_NEAR(r, best, 2e-6);
}

TEST(LinkIntegrated, PriceResponseMonotone) {
  const auto m = ErrorModel::exponential(100, 1.0);
  for (double mu : {0.1, 1.0, 10.0}) {
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
      const double r = solve_link_integrated(m, i * 0.02, mu, 2.0).code_rate;
      EXPECT_GE(r, prev - 1e-12);
      prev = r;
    }
  }
  for (double lam : {0.1, 1.0, 10.0}) {
    double prev = 2.0;
    for (int i = 0; i <= 200; ++i) {
      const double r = solve_link_integrated(m, lam, i * 0.05, 2.0).code_rate;
      EXPECT_LE(r, prev + 1e-12);
      prev = r;
    }
  }
}

TEST(SourceDifferentiated, Corners) {
  const auto u = Utility::alpha_fair(kDefaultUser);
  const auto free = solve_source_differentiated(u, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(free.rate, std::log(2.0));
  EXPECT_DOUBLE_EQ(free.reliability, 1.0);
  EXPECT_DOUBLE_EQ(solve_source_differentiated(u, 1e6, 0.0).rate, std::log(0.1));
}

TEST(SourceDifferentiated, LogUtilityIsLinearInLogRate) {
  UtilityParams p = kDefaultUser;
  p.alpha = 1.0;
  const auto u = Utility::alpha_fair(p);
  // U^x(e^y) = a (y - log x_min) / log(x_max / x_min), slope k.
  const double k = p.a / std::log(p.x_max / p.x_min);
  const double lo = std::log(p.x_min);
  const double hi = std::log(p.x_max);
  for (double lam : {0.0, 0.5 * k, 0.99 * k, 1.01 * k, 3 * k}) {
    const double y = solve_source_differentiated(u, lam, 0.0).rate;
    double best = lo;
    double best_f = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 10000; ++i) {
      const double v = lo + (hi - lo) * i / 10000.0;
      const double f = u.log_rate_value(v) - lam * v;
      if (f > best_f + 1e-15) {
        best_f = f;
        best = v;
      }
    }
    EXPECT_NEAR(y, best, 1e-9) << lam / k;
  }
  EXPECT_NEAR(solve_source_differentiated(u, k, 0.0).rate, 0.5 * (lo + hi), 1e-9);
}

TEST(SourceDifferentiated, MatchesLogGridSearch) {
  const auto u = Utility::alpha_fair(kDefaultUser);
  const double lo = std::log(0.1);
  const double hi = std::log(2.0);
  for (double lam : {0.05, 0.1, 0.2, 0.4}) {
    const auto resp = solve_source_differentiated(u, lam, 0.3);
    double best = lo;
    double best_f = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 30000; ++i) {
      const double y = lo + i * 1e-4;
      if (y > hi) break;
      const double f = u.log_rate_value(y) - lam * y;
      if (f > best_f) {
        best_f = f;
        best = y;
      }
    }
    EXPECT_NEAR(resp.rate, best, 1e-4) << lam;
  }
}

TEST(LinkDifferentiated, ProportionalShares) {
  const std::vector<double> lam{1.0, 3.0};
  const std::vector<double> mu{0.0, 0.0};
  const auto resp = solve_link_differentiated(ErrorModel::exponential(100, 1.0), lam, mu, 2.0);
  EXPECT_NEAR(resp.shares[0], 0.5, 1e-12);
  EXPECT_NEAR(resp.shares[1], 1.5, 1e-12);
  // Grid search over the simplex c1 + c2 = 2.
  double best = 0.0;
  double best_f = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < 20000; ++i) {
    const double c1 = i * 1e-4;
    const double f = lam[0] * std::log(c1) + lam[1] * std::log(2.0 - c1);
    if (f > best_f) {
      best_f = f;
      best = c1;
    }
  }
  EXPECT_NEAR(resp.shares[0], best, 1e-4);
}

TEST(LinkDifferentiated, SingleSourceCorners) {
  const auto m = ErrorModel::exponential(100, 1.0);
  const std::vector<double> one{1.0};
  const std::vector<double> zero{0.0};
  const auto free = solve_link_differentiated(m, one, zero, 2.0);
  EXPECT_DOUBLE_EQ(free.code_rates[0], 1.0);
  EXPECT_DOUBLE_EQ(free.shares[0], 2.0);
  const auto degenerate = solve_link_differentiated(m, zero, one, 2.0);
  EXPECT_DOUBLE_EQ(degenerate.code_rates[0], kCodeRateFloor);
  EXPECT_DOUBLE_EQ(degenerate.shares[0], 2.0);
}

TEST(LinkDifferentiated, ZeroPriceAmongPositive) {
  const auto m = ErrorModel::exponential(100, 1.0);
  const std::vector<double> lam{0.0, 2.0};
  const std::vector<double> mu{1.0, 1.0};
  const auto resp = solve_link_differentiated(m, lam, mu, 2.0);
  EXPECT_DOUBLE_EQ(resp.shares[0], kShareFloorFraction * 2.0);
  EXPECT_DOUBLE_EQ(resp.code_rates[0], kCodeRateFloor);
  EXPECT_NEAR(resp.shares[0] + resp.shares[1], 2.0, 1e-12);
}

TEST(LinkDifferentiated, AllZeroPricesSplitEvenly) {
  const std::vector<double> lam{0.0, 0.0, 0.0, 0.0};
  const auto c = proportional_shares(lam, 2.0);
  for (double v : c) EXPECT_NEAR(v, 0.5, 1e-12);
}

TEST(LinkDifferentiated, SharesSumToCapacity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> price(0.0, 5.0);
  std::uniform_int_distribution<int> count(1, 8);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> lam(static_cast<std::size_t>(count(rng)));
    for (auto& v : lam) v = price(rng);
    if (trial % 3 == 0) lam[0] = 0.0;
    const double cap = 0.5 + price(rng);
    const auto c = proportional_shares(lam, cap);
    const double sum = std::accumulate(c.begin(), c.end(), 0.0);
    EXPECT_NEAR(sum, cap, 1e-12 * cap);
    for (double v : c) EXPECT_GE(v, kShareFloorFraction * cap * (1 - 1e-12));
  }
}

TEST(LinkDifferentiated, FloorsRespected) {
  const std::vector<double> lam{0.01, 5.0, 5.0};
  const std::vector<double> floors{0.3, 0.1, 0.1};
  const auto c = proportional_shares(lam, 2.0, floors);
  EXPECT_DOUBLE_EQ(c[0], 0.3);
  EXPECT_NEAR(c[1], 0.85, 1e-12);
  EXPECT_NEAR(c[2], 0.85, 1e-12);
  const std::vector<double> too_big{1.0, 1.0, 0.5};
  EXPECT_THROW(proportional_shares(lam, 2.0, too_big), DomainError);
}

TEST(LinkDifferentiated, ImpliedBounds) {
  const std::vector<double> x_min{0.1, 0.4};
  const auto b = implied_link_bounds(x_min, 2.0);
  ASSERT_EQ(b.code_rate.size(), 2u);
  EXPECT_DOUBLE_EQ(b.code_rate[0], 0.05);
  EXPECT_DOUBLE_EQ(b.code_rate[1], 0.2);
  EXPECT_DOUBLE_EQ(b.share[1], 0.4);
  const std::vector<double> overload{1.5, 1.0};
  EXPECT_TRUE(implied_link_bounds(overload, 2.0).code_rate.empty());
}

TEST(OptimalityAudit, SourceSubproblems) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int inst = 0; inst < 10; ++inst) {
    UtilityParams p;
    p.a = 0.1 + 0.8 * unit(rng);
    p.alpha = 1.0 + 2.0 * unit(rng);
    p.x_min = 0.05 + 0.2 * unit(rng);
    p.x_max = p.x_min + 0.5 + 2.0 * unit(rng);
    p.r_min = 0.5 + 0.45 * unit(rng);
    const auto u = Utility::alpha_fair(p);
    const double lam = 2.0 * unit(rng);
    const double mu = 2.0 * unit(rng);
    const auto a = solve_source_integrated(u, lam, mu);
    const auto d = solve_source_differentiated(u, lam, mu);
    const double fa = source_objective(u, a.rate, a.reliability, lam, mu);
    const double fd = source_log_objective(u, d.rate, d.reliability, lam, mu);
    EXPECT_NEAR(a.value, fa, 1e-12);
    EXPECT_NEAR(d.value, fd, 1e-12);
    for (int k = 0; k < 1000; ++k) {
      const double x = p.x_min + (p.x_max - p.x_min) * unit(rng);
      const double r = p.r_min + (1 - p.r_min) * unit(rng);
      EXPECT_GE(fa, source_objective(u, x, r, lam, mu) - 1e-12);
      const double y = std::log(p.x_min) + std::log(p.x_max / p.x_min) * unit(rng);
      EXPECT_GE(fd, source_log_objective(u, y, r, lam, mu) - 1e-12);
    }
  }
}

TEST(OptimalityAudit, LinkSubproblems) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<ErrorModel> models{ErrorModel::binary(100, 1.0), ErrorModel::exponential(100, 1.0),
                                       ErrorModel::quadratic(60, 1.0, 1.3)};
  for (const auto& m : models) {
    const double cap = 1.0 + 2.0 * unit(rng);
    const double lam = 2.0 * unit(rng);
    const double mu = 5.0 * unit(rng);
    const auto resp = solve_link_integrated(m, lam, mu, cap);
    for (int k = 0; k < 10000; ++k) {
      EXPECT_GE(resp.value, link_objective(m, unit(rng), lam, mu, cap) - 1e-12) << m.describe();
    }
    const std::vector<double> lams{0.3 + unit(rng), 0.1 + unit(rng), 0.5 + unit(rng)};
    const std::vector<double> mus{5 * unit(rng), 5 * unit(rng), 5 * unit(rng)};
    const auto diff = solve_link_differentiated(m, lams, mus, cap);
    std::exponential_distribution<double> expo(1.0);
    for (int k = 0; k < 10000; ++k) {
      // Uniform point of the simplex sum c = C.
      std::vector<double> c(3);
      double total = 0.0;
      for (auto& v : c) total += (v = expo(rng));
      double f = 0.0;
      for (std::size_t i = 0; i < 3; ++i) {
        const double r = kCodeRateFloor + (1 - kCodeRateFloor) * unit(rng);
        f += lams[i] * (std::log(cap * c[i] / total) + std::log(r)) - mus[i] * m.value(r);
      }
      EXPECT_GE(diff.value, f - 1e-12) << m.describe();
    }
  }
}

TEST(ReliableCodeRates, MeetCapacityAndBeatUniform) {
  const auto m = ErrorModel::exponential(100, 1.0);
  const std::vector<double> x{0.3, 0.5};
  const std::vector<double> mu{1.0, 2.0};
  const auto r = reliable_code_rates(m, x, mu, 2.0);
  EXPECT_NEAR(x[0] / r[0] + x[1] / r[1], 2.0, 1e-9);
  // Any other split of the capacity gives a larger weighted error.
  const double best = mu[0] * m.value(r[0]) + mu[1] * m.value(r[1]);
  for (int i = 1; i < 200; ++i) {
    const double c0 = x[0] + (2.0 - x[0] - x[1]) * i / 200.0;
    const double r0 = x[0] / c0;
    const double r1 = x[1] / (2.0 - c0);
    if (r1 > 1.0) continue;
    EXPECT_LE(best, mu[0] * m.value(r0) + mu[1] * m.value(r1) + 1e-12);
  }
}
