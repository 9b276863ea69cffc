#include "erm/special_fn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "erm/errors.hpp"
#include "erm/rng.hpp"

namespace erm {

namespace {

constexpr double kLanczosG = 671.0 / 128.0;
constexpr std::array<double, 14> kLanczosCoef = {
    57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,     -0.491913816097620199,
    0.339946499848118887e-4, 0.465236289270485756e-4, -0.983744753048795646e-4, 0.158088703224912494e-3,
    -0.210264441724104883e-3, 0.217439618115212643e-3, -0.164318106536763890e-3, 0.844182239838527433e-4,
    -0.261908384015814087e-4, 0.368991826595316234e-5};
constexpr double kLanczosC0 = 0.999999999999997092;
constexpr double kSqrt2Pi = 2.5066282746310005024;
// Largest x for which Gamma(x) is a finite double.
constexpr double kGammaMaxArg = 171.6;

double lanczos_series(double x) {
  double ser = kLanczosC0;
  double y = x;
  for (double c : kLanczosCoef) ser += c / ++y;
  return ser;
}

void require_domain(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError(std::string(what) + " must be finite and > 0");
}

}  // namespace

double gamma_function(double x) {
  require_domain(x, "gamma argument");
  if (x > kGammaMaxArg) return std::numeric_limits<double>::infinity();
  const double t = x + kLanczosG;
  // t^{x+1/2} split in two halves so the power does not overflow before e^{-t}.
  const double half = std::pow(t, 0.5 * (x + 0.5));
  return half * (half * std::exp(-t)) * kSqrt2Pi * lanczos_series(x) / x;
}

double log_gamma(double x) {
  require_domain(x, "log_gamma argument");
  if (x <= 170.0) return std::log(gamma_function(x));
  const double t = x + kLanczosG;
  return (x + 0.5) * std::log(t) - t + std::log(kSqrt2Pi * lanczos_series(x) / x);
}

double beta_function(double x, double y) {
  require_domain(x, "beta argument x");
  require_domain(y, "beta argument y");
  if (x + y <= 170.0) return gamma_function(x) * (gamma_function(y) / gamma_function(x + y));
  return std::exp(log_gamma(x) + log_gamma(y) - log_gamma(x + y));
}

double gamma_ratio(double x, double alpha) {
  require_domain(x, "gamma ratio argument x");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("gamma ratio shift must be >= 0");
  if (alpha == 0.0) return 1.0;
  if (x + alpha <= 170.0) return gamma_function(x + alpha) / gamma_function(x);
  return std::exp(log_gamma(x + alpha) - log_gamma(x));
}

long long strict_floor(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("strict floor needs finite x > 0");
  return static_cast<long long>(std::ceil(x)) - 1;
}

IneqCheckResult check_chain(std::vector<double> values) {
  IneqCheckResult r;
  r.values = std::move(values);
  r.slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < r.values.size(); ++i) {
    const double lo = r.values[i];
    const double hi = r.values[i + 1];
    const double scale = std::max(std::abs(lo), std::abs(hi));
    const double gap = scale == 0.0 ? 0.0 : (hi - lo) / scale;
    r.slack = std::min(r.slack, std::isnan(gap) ? -std::numeric_limits<double>::infinity() : gap);
  }
  if (r.values.size() < 2) r.slack = 0.0;
  r.holds = r.slack >= -kIneqSlackTolerance;
  return r;
}

IneqCheckResult check_unit_interval_ineq(double alpha, double x) {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(x >= 0.0 && x <= 1.0))
    throw DomainError("unit-interval inequality needs alpha, x in [0, 1]");
  return check_chain({std::pow(1.0 - x, alpha), 1.0 - alpha * x});
}

IneqCheckResult check_wendel(double x, double alpha) {
  require_domain(x, "Wendel argument x");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("Wendel shift alpha must lie in [0, 1]");
  return check_chain({std::pow(std::max(x + alpha - 1.0, 0.0), alpha), x / std::pow(x + alpha, 1.0 - alpha),
                      gamma_ratio(x, alpha), std::pow(x, alpha)});
}

IneqCheckResult check_gamma_ratio_general(double x, double alpha) {
  require_domain(x, "gamma ratio argument x");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("gamma ratio shift must be >= 0");
  return check_chain({std::pow(std::max(x + std::min(alpha - 1.0, 0.0), 0.0), alpha), gamma_ratio(x, alpha),
                      std::pow(x + std::max(alpha - 1.0, 0.0), alpha)});
}

IneqCheckResult check_gamma_poly_bound(double x) {
  require_domain(x, "gamma bound argument x");
  return check_chain({gamma_function(x + 1.0), std::pow(x, static_cast<double>(strict_floor(x))),
                      std::max(1.0, std::pow(x, x))});
}

IneqCheckResult check_beta_bounds(double x, double y) {
  require_domain(x, "beta argument x");
  require_domain(y, "beta argument y");
  if (!(x + y > 1.0)) throw DomainError("beta bounds need x + y > 1");
  const double gx = gamma_function(x);
  const double lower_base = y + std::max(x - 1.0, 0.0);
  const double upper_base = y + std::min(x - 1.0, 0.0);
  return check_chain({gx / std::pow(lower_base, x), beta_function(x, y), gx / std::pow(upper_base, x),
                      std::max(1.0, std::pow(x, x)) / (x * std::pow(upper_base, x))});
}

std::vector<SweepSummary> run_special_sweeps(std::size_t trials, std::uint64_t seed) {
  struct Case {
    const char* name;
    std::function<IneqCheckResult(Stream&)> draw;
  };
  // (0, hi] rather than [0, hi) so positive-domain checks never see 0.
  auto open_low = [](Stream& s, double hi) { return hi * (1.0 - s.uniform()); };
  const std::vector<Case> cases = {
      {"unit_interval", [](Stream& s) { return check_unit_interval_ineq(s.uniform(), s.uniform()); }},
      {"wendel", [&](Stream& s) { return check_wendel(open_low(s, 100.0), s.uniform()); }},
      {"gamma_ratio_general",
       [&](Stream& s) { return check_gamma_ratio_general(open_low(s, 50.0), 20.0 * s.uniform()); }},
      {"gamma_poly_bound", [&](Stream& s) { return check_gamma_poly_bound(open_low(s, 30.0)); }},
      {"beta_bounds",
       [&](Stream& s) {
         double x = 0.0, y = 0.0;
         do {
           x = open_low(s, 20.0);
           y = open_low(s, 50.0);
         } while (!(x + y > 1.0));
         return check_beta_bounds(x, y);
       }},
  };

  std::vector<SweepSummary> out;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    Stream stream = derive_stream(seed, {StreamPurpose::sweep, i, 0});
    SweepSummary s;
    s.name = cases[i].name;
    s.trials = trials;
    s.worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
      const IneqCheckResult r = cases[i].draw(stream);
      if (!r.holds) ++s.violations;
      s.worst_slack = std::min(s.worst_slack, r.slack);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace erm
