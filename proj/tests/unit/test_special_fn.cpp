#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "../oracle_values.hpp"
#include "erm/errors.hpp"
#include "erm/rng.hpp"
#include "erm/special_fn.hpp"

using namespace erm;

TEST(Gamma, BasicValues) {
  EXPECT_NEAR(gamma_function(1.0), 1.0, 1e-14);
  EXPECT_NEAR(gamma_function(2.0), 1.0, 1e-14);
  EXPECT_NEAR(gamma_function(0.5), oracle::kGammaHalf, 1e-14 * oracle::kGammaHalf);
  EXPECT_NEAR(gamma_function(5.0), 24.0, 24.0 * 1e-14);
  EXPECT_THROW(gamma_function(0.0), DomainError);
  EXPECT_THROW(gamma_function(-1.0), DomainError);
  EXPECT_THROW(log_gamma(std::nan("")), DomainError);
  EXPECT_TRUE(std::isinf(gamma_function(200.0)));
  EXPECT_TRUE(std::isfinite(log_gamma(1e6)));
}

TEST(Gamma, ReferenceTable) {
  for (const auto& [x, expected] : oracle::kLogGamma) {
    // Relative accuracy of Gamma translates to absolute accuracy of log Gamma.
    EXPECT_NEAR(log_gamma(x), expected, 1e-13 + 4e-16 * std::abs(expected)) << "x = " << x;
  }
}

TEST(Gamma, Recurrence) {
  Stream s = derive_stream(1, {StreamPurpose::sweep, 100, 0});
  for (int i = 0; i < 1000; ++i) {
    const double x = 50.0 * (1.0 - s.uniform());
    const double lhs = gamma_function(x + 1.0);
    const double rhs = x * gamma_function(x);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::abs(rhs)) << "x = " << x;
  }
}

TEST(Gamma, Reflection) {
  Stream s = derive_stream(2, {StreamPurpose::sweep, 100, 0});
  for (int i = 0; i < 1000; ++i) {
    const double x = 0.01 + 0.98 * s.uniform();
    const double lhs = gamma_function(x) * gamma_function(1.0 - x);
    const double rhs = std::numbers::pi / std::sin(std::numbers::pi * x);
    EXPECT_LE(std::abs(lhs - rhs), 1e-13 * rhs) << "x = " << x;
  }
}

TEST(Beta, Values) {
  EXPECT_NEAR(beta_function(1, 5), 0.2, 1e-15);
  EXPECT_NEAR(beta_function(0.5, 0.5), oracle::kBetaHalfHalf, 1e-14);
  EXPECT_NEAR(beta_function(0.5, 11), oracle::kBetaChain[1], 1e-14);
  EXPECT_NEAR(beta_function(3.5, 1.25), beta_function(1.25, 3.5), 1e-15);
  EXPECT_NEAR(beta_function(100, 100) / std::exp(log_gamma(100) * 2 - log_gamma(200)), 1.0, 1e-11);
  EXPECT_THROW(beta_function(0, 1), DomainError);
}

TEST(GammaRatio, Values) {
  EXPECT_EQ(gamma_ratio(3, 0), 1.0);
  EXPECT_NEAR(gamma_ratio(3, 2), 12.0, 1e-12);
  EXPECT_NEAR(gamma_ratio(2, 0.5), oracle::kWendelChain[2], 1e-14);
  EXPECT_NEAR(gamma_ratio(500, 0.5) / std::sqrt(500.0), 1.0, 1e-3);
  EXPECT_THROW(gamma_ratio(1, -0.5), DomainError);
}

TEST(StrictFloor, IntegersMapBelow) {
  EXPECT_EQ(strict_floor(3.0), 2);
  EXPECT_EQ(strict_floor(1.0), 0);
  EXPECT_EQ(strict_floor(0.5), 0);
  EXPECT_EQ(strict_floor(3.2), 3);
  EXPECT_THROW(strict_floor(0.0), DomainError);
}

TEST(Chain, Semantics) {
  EXPECT_TRUE(check_chain({1, 2, 3}).holds);
  EXPECT_FALSE(check_chain({1, 3, 2}).holds);
  EXPECT_DOUBLE_EQ(check_chain({1, 3, 2}).slack, -1.0 / 3.0);
  EXPECT_TRUE(check_chain({1, 1 - 1e-13}).holds);
  EXPECT_FALSE(check_chain({1, std::nan("")}).holds);
  EXPECT_EQ(check_chain({0, 0}).slack, 0.0);
}

TEST(UnitInterval, Examples) {
  const auto eq = check_unit_interval_ineq(1.0, 0.3);
  EXPECT_TRUE(eq.holds);
  EXPECT_NEAR(eq.slack, 0.0, 1e-15);
  const auto zero = check_unit_interval_ineq(0.0, 0.7);
  EXPECT_EQ(zero.values, (std::vector<double>{1.0, 1.0}));
  EXPECT_THROW(check_unit_interval_ineq(1.5, 0.5), DomainError);
}

TEST(Wendel, Examples) {
  const auto r = check_wendel(2.0, 0.5);
  ASSERT_EQ(r.values.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.values[i], oracle::kWendelChain[i], 1e-14);
  EXPECT_TRUE(r.holds);
  const auto a0 = check_wendel(3.7, 0.0);
  for (double v : a0.values) EXPECT_NEAR(v, 1.0, 1e-14);
  const auto a1 = check_wendel(3.7, 1.0);
  for (double v : a1.values) EXPECT_NEAR(v, 3.7, 1e-13);
  EXPECT_THROW(check_wendel(1.0, 1.5), DomainError);
}

TEST(GammaRatioGeneral, Examples) {
  const auto r = check_gamma_ratio_general(3.0, 2.0);
  EXPECT_NEAR(r.values[0], 9.0, 1e-13);
  EXPECT_NEAR(r.values[1], 12.0, 1e-12);
  EXPECT_NEAR(r.values[2], 16.0, 1e-13);
  const auto one = check_gamma_ratio_general(4.5, 1.0);
  for (double v : one.values) EXPECT_NEAR(v, 4.5, 1e-13);
}

TEST(GammaPoly, Examples) {
  const auto one = check_gamma_poly_bound(1.0);
  EXPECT_NEAR(one.values[0], 1.0, 1e-14);
  EXPECT_EQ(one.values[1], 1.0);
  EXPECT_EQ(one.values[2], 1.0);
  const auto three = check_gamma_poly_bound(3.0);
  EXPECT_NEAR(three.values[0], 6.0, 1e-13);
  EXPECT_EQ(three.values[1], 9.0);
  EXPECT_EQ(three.values[2], 27.0);
  EXPECT_TRUE(three.holds);
}

TEST(BetaBounds, Examples) {
  const auto r = check_beta_bounds(0.5, 11.0);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.values[i], oracle::kBetaChain[i], 1e-14);
  EXPECT_TRUE(r.holds);
  const auto x1 = check_beta_bounds(1.0, 4.0);
  for (double v : x1.values) EXPECT_NEAR(v, 0.25, 1e-15);
  EXPECT_THROW(check_beta_bounds(0.3, 0.4), DomainError);
}

TEST(Sweeps, NoViolations) {
  const auto sweeps = run_special_sweeps(10000, 2024);
  ASSERT_EQ(sweeps.size(), 5u);
  for (const auto& s : sweeps) {
    EXPECT_EQ(s.trials, 10000u);
    EXPECT_EQ(s.violations, 0u) << s.name;
    EXPECT_GE(s.worst_slack, -kIneqSlackTolerance) << s.name;
  }
  EXPECT_GE(sweeps[0].worst_slack, -1e-14);
}

TEST(Sweeps, Deterministic) {
  const auto a = run_special_sweeps(500, 9);
  const auto b = run_special_sweeps(500, 9);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].worst_slack, b[i].worst_slack);
}
