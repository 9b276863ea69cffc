#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace erm {

/// Gamma via the Lanczos approximation with g = 671/128 and 14 terms.
/// Relative error of Gamma is below 1e-13 on (0, 170]. Throws DomainError for
/// x <= 0 or non-finite x.
double gamma_function(double x);
double log_gamma(double x);
// Gamma(x) Gamma(y) / Gamma(x + y).
double beta_function(double x, double y);
// Gamma(x + alpha) / Gamma(x).
double gamma_ratio(double x, double alpha);

// max([0, x) n N_0): the largest integer strictly below x, so 3 maps to 2.
long long strict_floor(double x);

inline constexpr double kIneqSlackTolerance = 1e-11;

/// A chain v[0] <= v[1] <= ... checked link by link. slack is the smallest
/// relative gap (v[i+1] - v[i]) / max(|v[i]|, |v[i+1]|) (0 for equal links);
/// holds means slack >= -kIneqSlackTolerance.
struct IneqCheckResult {
  std::vector<double> values;
  bool holds = true;
  double slack = 0.0;
};

IneqCheckResult check_chain(std::vector<double> values);

// (1 - x)^alpha <= 1 - alpha x on alpha, x in [0, 1].
IneqCheckResult check_unit_interval_ineq(double alpha, double x);
// (max{x + alpha - 1, 0})^alpha <= x / (x + alpha)^{1 - alpha} <= Gamma ratio <= x^alpha.
IneqCheckResult check_wendel(double x, double alpha);
// (max{x + min{alpha - 1, 0}, 0})^alpha <= Gamma ratio <= (x + max{alpha - 1, 0})^alpha.
IneqCheckResult check_gamma_ratio_general(double x, double alpha);
// Gamma(x + 1) <= x^{strict_floor(x)} <= max{1, x^x}.
IneqCheckResult check_gamma_poly_bound(double x);
// Gamma(x) / (y + max{x-1,0})^x <= B(x,y) <= Gamma(x) / (y + min{x-1,0})^x
//   <= max{1, x^x} / (x (y + min{x-1,0})^x), for x + y > 1.
IneqCheckResult check_beta_bounds(double x, double y);

struct SweepSummary {
  std::string name;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_slack = 0.0;
};

// Random sweeps of every check_* over its documented domain, `trials` points each.
std::vector<SweepSummary> run_special_sweeps(std::size_t trials, std::uint64_t seed);

}  // namespace erm
