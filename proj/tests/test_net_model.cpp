#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rrnum/rrnum.hpp"

using namespace rrnum;

namespace {

// E(r) = exp(-k) for every r: a link with a fixed error probability.
ErrorModel constant_error(double p) {
  if (p >= 1.0) {
    return ErrorModel::general(1.0, {[](double) { return 0.0; }, [](double) { return 0.0; },
                                     [](double) { return 0.0; }});
  }
  const double k = p > 0.0 ? -std::log(p) : 800.0;
  return ErrorModel::general(1.0, {[k](double) { return k; }, [](double) { return 0.0; },
                                   [](double) { return 0.0; }});
}

NetworkSpec chain_with_errors(const std::vector<double>& errors) {
  std::vector<LinkSpec> links;
  std::vector<std::size_t> route;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    links.push_back({"L" + std::to_string(i + 1), 2.0, constant_error(errors[i])});
    route.push_back(i);
  }
  return NetworkSpec(links, {make_source("S1", route, UtilityParams{})});
}

CodeRates half_rates(const NetworkSpec& net) {
  return CodeRates::per_link(std::vector<double>(net.num_links(), 0.5));
}

std::vector<ErrorModel> sample_models() {
  return {ErrorModel::binary(100, 1.0), ErrorModel::binary(1, 1.0), ErrorModel::exponential(100, 1.0),
          ErrorModel::exponential(20, 1.2), ErrorModel::quadratic(50, 1.0, 1.5),
          ErrorModel::general(50, {[](double r) { return (1 - r) * (1 - r) + 0.1; },
                                   [](double r) { return -2 * (1 - r); }, [](double) { return 2.0; }})};
}

}  // namespace

TEST(LinkError, BinaryEndPoints) {
  const auto m = ErrorModel::binary(100, 1.0);
  EXPECT_DOUBLE_EQ(link_error(m, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(link_error(m, 0.0), 0.5 * std::ldexp(1.0, -100));
}

TEST(LinkError, GeneralExponent) {
  const auto m = ErrorModel::general(50, {[](double r) { return (1 - r) * (1 - r); },
                                          [](double r) { return -2 * (1 - r); },
                                          [](double) { return 2.0; }});
  EXPECT_NEAR(link_error(m, 0.5), std::exp(-12.5), 1e-20);
}

TEST(LinkError, RejectsRateOutsideUnitInterval) {
  const auto m = ErrorModel::binary(100, 1.0);
  EXPECT_THROW(link_error(m, -0.01), DomainError);
  EXPECT_THROW(link_error(m, 1.01), DomainError);
  EXPECT_THROW(link_error(m, std::nan("")), DomainError);
}

TEST(LinkError, RejectsBadParameters) {
  EXPECT_THROW(ErrorModel::binary(0, 1.0), DomainError);
  EXPECT_THROW(ErrorModel::quadratic(10, 1.0, 1.0), DomainError);
  EXPECT_THROW(ErrorModel::quadratic(10, 0.0, 1.5), DomainError);
  EXPECT_THROW(ErrorModel::general(10, {}), DomainError);
}

TEST(LinkError, MonotoneAndPositiveOnGrid) {
  for (const auto& m : sample_models()) {
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double v = m(i / 1000.0);
      EXPECT_GT(v, 0.0) << m.describe();
      EXPECT_GE(v, prev) << m.describe() << " at " << i;
      prev = v;
    }
  }
}

TEST(LinkError, BinaryFiniteDifferenceConvexity) {
  for (double n : {1.0, 5.0, 100.0, 500.0}) {
    const auto m = ErrorModel::binary(n, 1.0);
    const double h = 1e-3 / n;
    for (int i = 1; i < 1000; ++i) {
      const double r = i / 1000.0;
      const double dd = m.value(r + h) - 2 * m.value(r) + m.value(r - h);
      EXPECT_GT(dd, 0.0) << "N=" << n << " r=" << r;
    }
  }
}

TEST(LinkError, AnalyticDerivativesMatchDifferences) {
  for (const auto& m : sample_models()) {
    for (double r : {0.1, 0.4, 0.7, 0.95}) {
      const double h = 1e-5 / m.block_length();
      const double d1 = (m.value(r + h) - m.value(r - h)) / (2 * h);
      const double d2 = (m.value(r + h) - 2 * m.value(r) + m.value(r - h)) / (h * h);
      EXPECT_NEAR(m.derivative(r), d1, 1e-5 * std::abs(d1)) << m.describe();
      EXPECT_NEAR(m.second_derivative(r), d2, 1e-3 * std::abs(d2) + 1e-300) << m.describe();
    }
  }
}

TEST(LinkError, InverseRoundTrip) {
  for (const auto& m : sample_models()) {
    for (double r : {0.05, 0.3, 0.8}) {
      EXPECT_NEAR(m.inverse(m.value(r)), r, 1e-9) << m.describe();
    }
  }
}

TEST(Reliability, ApproximateExamples) {
  {
    const auto net = chain_with_errors({0.01, 0.01});
    EXPECT_NEAR(end_to_end_reliability_approx(net, half_rates(net), 0), 0.98, 1e-15);
  }
  {
    const auto net = chain_with_errors({0.0});
    EXPECT_DOUBLE_EQ(end_to_end_reliability_approx(net, half_rates(net), 0), 1.0);
  }
  {
    const auto net = chain_with_errors({0.01, 0.02, 0.005});
    EXPECT_NEAR(end_to_end_reliability_approx(net, half_rates(net), 0), 0.965, 1e-15);
  }
}

TEST(Reliability, ExactExamples) {
  {
    const auto net = chain_with_errors({0.01, 0.01});
    EXPECT_NEAR(end_to_end_reliability_exact(net, half_rates(net), 0), 0.9801, 1e-15);
  }
  {
    const auto net = chain_with_errors({0.3, 1.0, 0.1});
    EXPECT_DOUBLE_EQ(end_to_end_reliability_exact(net, half_rates(net), 0), 0.0);
  }
  {
    const auto net = chain_with_errors({0.1, 0.2});
    EXPECT_NEAR(end_to_end_reliability_exact(net, half_rates(net), 0), 0.72, 1e-15);
  }
}

TEST(Reliability, ApproximationIsUnclamped) {
  const auto net = chain_with_errors({0.7, 0.6});
  EXPECT_NEAR(end_to_end_reliability_approx(net, half_rates(net), 0), -0.3, 1e-12);
}

TEST(Reliability, MissingCodeRateIsStructural) {
  const auto net = chain_with_errors({0.01, 0.01});
  EXPECT_THROW(end_to_end_reliability_approx(net, CodeRates::per_link({0.5}), 0), StructuralError);
  EXPECT_THROW(end_to_end_reliability_exact(net, CodeRates::per_pair({0.5, std::nan("")}), 0),
               StructuralError);
}

TEST(Reliability, ApproximationErrorIsSecondOrder) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> e(1e-6, 0.1);
  std::uniform_int_distribution<int> len(1, 6);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> errors(static_cast<std::size_t>(len(rng)));
    double sum = 0.0;
    for (auto& v : errors) {
      v = e(rng);
      sum += v;
    }
    const auto net = chain_with_errors(errors);
    const double approx = end_to_end_reliability_approx(net, half_rates(net), 0);
    const double exact = end_to_end_reliability_exact(net, half_rates(net), 0);
    EXPECT_LE(std::abs(approx - exact), sum * sum + 1e-15);
  }
}

TEST(Lemma1, ThresholdExamples) {
  const auto m = ErrorModel::binary(10, 1.0);
  const auto ok = check_lemma1(m, 0.5, 2.0);
  EXPECT_TRUE(ok.holds_for_n);
  EXPECT_DOUBLE_EQ(ok.minimum_n, 8.0);
  const auto bad = check_lemma1(m, 0.1, 2.0);
  EXPECT_FALSE(bad.holds_for_n);
  EXPECT_NEAR(bad.minimum_n, 200.0, 1e-9);
  EXPECT_THROW(check_lemma1(m, 0.0, 2.0), DomainError);
  EXPECT_THROW(check_lemma1(m, -1.0, 2.0), DomainError);
}

TEST(Lemma1, BinaryConvexForAnyBlockLength) {
  for (double n : {1.0, 2.0, 10.0, 100.0, 1000.0}) {
    const auto r = check_lemma1(ErrorModel::binary(n, 1.0));
    EXPECT_TRUE(r.grid_convex) << n;
    EXPECT_TRUE(r.holds_for_n) << n;
  }
}

TEST(Lemma1, ShortQuadraticCodeIsNotConvex) {
  // E = exp(-N k (R0 - r)^2) has an inflection where 2 N k (R0 - r)^2 = 1.
  const auto m = ErrorModel::quadratic(2, 1.0, 1.2);
  const auto r = check_lemma1(m);
  EXPECT_FALSE(r.grid_convex);
  EXPECT_FALSE(r.holds_for_n);
  const auto long_code = check_lemma1(ErrorModel::quadratic(200, 1.0, 1.2));
  EXPECT_TRUE(long_code.grid_convex);
}

TEST(Lemma2, AlphaFairExamples) {
  auto with_alpha = [](double alpha) {
    UtilityParams p;
    p.alpha = alpha;
    p.a = 1.0;
    return Utility::alpha_fair(p);
  };
  const auto log_u = check_lemma2(with_alpha(1.0));
  EXPECT_TRUE(log_u.holds);
  EXPECT_NEAR(log_u.worst_g, 0.0, 1e-12);
  EXPECT_TRUE(check_lemma2(with_alpha(2.0)).holds);
  EXPECT_LT(check_lemma2(with_alpha(2.0)).worst_g, 0.0);
  const auto half = check_lemma2(with_alpha(0.5));
  EXPECT_FALSE(half.holds);
  EXPECT_GT(half.worst_g, 0.0);
}

TEST(Lemma2, MatchesClosedForm) {
  for (double alpha : {0.5, 1.0, 1.1, 2.0}) {
    UtilityParams p;
    p.alpha = alpha;
    const auto u = Utility::alpha_fair(p);
    // Normalized rate term: a * phi(x) / span with phi' = (1 - alpha) x^-alpha, or 1/x.
    const double span = alpha == 1.0 ? std::log(p.x_max / p.x_min)
                                     : std::pow(p.x_max, 1 - alpha) - std::pow(p.x_min, 1 - alpha);
    const auto grid = linear_grid(p.x_min, p.x_max, 57);
    for (double x : grid) {
      const double phi_term =
          alpha == 1.0 ? 0.0 : (1 - alpha) * (1 - alpha) * std::pow(x, -alpha);
      const double expected = p.a * phi_term / span;
      EXPECT_NEAR(u.elasticity_margin(x), expected, 1e-12 * (1 + std::abs(expected)))
          << "alpha " << alpha << " x " << x;
    }
    EXPECT_EQ(check_lemma2(u).holds, alpha >= 1.0) << alpha;
  }
}

TEST(Utility, CornerValues) {
  const auto u = Utility::alpha_fair(UtilityParams{0.5, 1.1, 0.1, 2.0, 0.9});
  EXPECT_NEAR(eval_utility(u, 0.1, 0.9).value, 0.0, 1e-15);
  EXPECT_NEAR(eval_utility(u, 2.0, 1.0).value, 1.0, 1e-15);
  const auto pt = eval_utility(u, 1.0, 0.95);
  EXPECT_GT(pt.d_rate, 0.0);
  EXPECT_GT(pt.d_reliability, 0.0);
}

TEST(Utility, FullRateWeightIgnoresReliability) {
  const auto u = Utility::alpha_fair(UtilityParams{1.0, 1.1, 0.1, 2.0, 0.9});
  EXPECT_DOUBLE_EQ(u(1.0, 0.9), u(1.0, 1.0));
  EXPECT_DOUBLE_EQ(eval_utility(u, 1.0, 0.95).d_reliability, 0.0);
}

TEST(Utility, RejectsOutOfBox) {
  const auto u = Utility::alpha_fair(UtilityParams{});
  EXPECT_THROW(u(0.05, 0.95), DomainError);
  EXPECT_THROW(u(1.0, 0.8), DomainError);
  EXPECT_THROW(u(2.5, 0.95), DomainError);
  EXPECT_THROW(Utility::alpha_fair(UtilityParams{1.5, 1.1, 0.1, 2.0, 0.9}), DomainError);
  EXPECT_THROW(Utility::alpha_fair(UtilityParams{0.5, 0.0, 0.1, 2.0, 0.9}), DomainError);
  EXPECT_THROW(Utility::alpha_fair(UtilityParams{0.5, 1.1, 2.0, 0.1, 0.9}), DomainError);
  EXPECT_THROW(Utility::alpha_fair(UtilityParams{0.5, 1.1, 0.1, 2.0, 1.0}), DomainError);
}

TEST(Utility, DerivativesMatchCentralDifferences) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    UtilityParams p;
    p.a = 0.05 + 0.9 * unit(rng);
    p.alpha = 0.3 + 2.5 * unit(rng);
    const auto u = Utility::alpha_fair(p);
    const double x = p.x_min + (p.x_max - p.x_min) * (0.02 + 0.96 * unit(rng));
    const double r = p.r_min + (1 - p.r_min) * (0.02 + 0.96 * unit(rng));
    const double hx = 1e-6 * x;
    const double hr = 1e-7;
    const double fx = (u(x + hx, r) - u(x - hx, r)) / (2 * hx);
    const double fr = (u(x, r + hr) - u(x, r - hr)) / (2 * hr);
    const auto pt = u.evaluate(x, r);
    EXPECT_NEAR(pt.d_rate, fx, 1e-5 * std::abs(fx));
    EXPECT_NEAR(pt.d_reliability, fr, 1e-5 * std::abs(fr));
    const double sx = (u.rate_first(x + hx) - u.rate_first(x - hx)) / (2 * hx);
    EXPECT_NEAR(u.rate_second(x), sx, 1e-5 * std::abs(sx));
  }
}

TEST(Utility, IncreasingAndConcaveOnBox) {
  for (double alpha : {0.5, 1.0, 1.1, 3.0}) {
    const auto u = Utility::alpha_fair(UtilityParams{0.5, alpha, 0.1, 2.0, 0.9});
    for (double x : linear_grid(0.1, 2.0, 50)) {
      EXPECT_GT(u.rate_first(x), 0.0);
      EXPECT_LT(u.rate_second(x), 0.0);
    }
    for (double r : linear_grid(0.9, 1.0, 50)) {
      EXPECT_GT(u.reliability_first(r), 0.0);
      EXPECT_LT(u.reliability_second(r), 0.0);
    }
  }
}

TEST(Capacity, SlackExamples) {
  const auto one_link = [](std::size_t flows) {
    std::vector<SourceSpec> sources;
    for (std::size_t i = 0; i < flows; ++i) {
      sources.push_back(make_source("S" + std::to_string(i + 1), {0}, UtilityParams{}));
    }
    return NetworkSpec({{"L1", 2.0, ErrorModel::exponential(100, 1.0)}}, sources);
  };
  {
    const auto net = one_link(2);
    FlowAllocation a{{0.5, 0.5}, {1, 1}, CodeRates::per_pair({0.5, 0.5}), {}};
    const auto rep = check_capacity_feasible(net, a, 1e-12);
    EXPECT_NEAR(rep.slack[0], 0.0, 1e-15);
    EXPECT_TRUE(rep.feasible);
  }
  {
    const auto net = one_link(1);
    FlowAllocation a{{1.0}, {1}, CodeRates::per_link({0.4}), {}};
    const auto rep = check_capacity_feasible(net, a, 1e-12);
    EXPECT_NEAR(rep.slack[0], -0.5, 1e-12);
    EXPECT_FALSE(rep.feasible);
  }
  {
    const NetworkSpec net({{"L1", 2.0, ErrorModel::exponential(100, 1.0)},
                           {"L2", 3.0, ErrorModel::exponential(100, 1.0)}},
                          {make_source("S1", {0}, UtilityParams{})});
    FlowAllocation a{{1.0}, {1}, CodeRates::per_link({1.0, 1.0}), {}};
    const auto rep = check_capacity_feasible(net, a, 0.0);
    EXPECT_DOUBLE_EQ(rep.slack[1], 3.0);
  }
}

TEST(Capacity, ZeroCodeRateIsInfiniteViolation) {
  const NetworkSpec net({{"L1", 2.0, ErrorModel::exponential(100, 1.0)}},
                        {make_source("S1", {0}, UtilityParams{})});
  FlowAllocation a{{1.0}, {1}, CodeRates::per_link({0.0}), {}};
  const auto rep = check_capacity_feasible(net, a, 1e-9);
  EXPECT_TRUE(std::isinf(rep.slack[0]));
  EXPECT_LT(rep.slack[0], 0.0);
  EXPECT_FALSE(rep.feasible);
}

TEST(Network, ReverseMapConsistentWithRoutes) {
  const auto net = default_topology();
  for (std::size_t s = 0; s < net.num_sources(); ++s) {
    for (std::size_t l : net.source(s).route) {
      const auto& on = net.sources_on(l);
      EXPECT_NE(std::find(on.begin(), on.end(), s), on.end());
      EXPECT_EQ(net.pairs()[net.pair_index(l, s)].source, s);
    }
  }
  std::size_t total = 0;
  for (std::size_t l = 0; l < net.num_links(); ++l) {
    for (std::size_t s : net.sources_on(l)) {
      const auto& route = net.source(s).route;
      EXPECT_NE(std::find(route.begin(), route.end(), l), route.end());
    }
    total += net.sources_on(l).size();
  }
  EXPECT_EQ(total, net.num_pairs());
}

TEST(Network, RejectsBadRoutes) {
  const LinkSpec l1{"L1", 2.0, ErrorModel::exponential(100, 1.0)};
  EXPECT_THROW(NetworkSpec({l1}, {make_source("S", {}, UtilityParams{})}), ValidationError);
  EXPECT_THROW(NetworkSpec({l1}, {make_source("S", {0, 0}, UtilityParams{})}), ValidationError);
  EXPECT_THROW(NetworkSpec({l1}, {make_source("S", {3}, UtilityParams{})}), ValidationError);
  EXPECT_THROW(NetworkSpec({{"L1", 0.0, ErrorModel::exponential(100, 1.0)}},
                           {make_source("S", {0}, UtilityParams{})}),
               ValidationError);
  EXPECT_THROW(NetworkSpec({l1}, {}), ValidationError);
}

TEST(Network, IsolatedLinkIsOnlyAWarning) {
  const NetworkSpec net({{"L1", 2.0, ErrorModel::exponential(100, 1.0)},
                         {"idle", 2.0, ErrorModel::exponential(100, 1.0)}},
                        {make_source("S1", {0}, UtilityParams{})});
  const auto rep = validate_network(net, true);
  EXPECT_TRUE(rep.ok());
  ASSERT_EQ(rep.warnings.size(), 1u);
  EXPECT_NE(rep.warnings[0].find("idle"), std::string::npos);
}

TEST(Validation, StrictRejectsAndPermissiveWarns) {
  UtilityParams inelastic;
  inelastic.alpha = 0.5;
  const NetworkSpec net({{"L1", 2.0, ErrorModel::exponential(100, 1.0)}},
                        {make_source("S1", {0}, inelastic)});
  EXPECT_NO_THROW(enforce_validation(net, false, true));
  EXPECT_THROW(enforce_validation(net, true, true), ValidationError);
  const auto rep = enforce_validation(net, true, false);
  EXPECT_TRUE(rep.ok());
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(Validation, PolicyNamesRoundTrip) {
  for (auto p : {Policy::static_reliability, Policy::integrated, Policy::differentiated}) {
    EXPECT_EQ(parse_policy(policy_name(p)), p);
  }
  EXPECT_THROW(parse_policy("dynamic"), ValidationError);
}
