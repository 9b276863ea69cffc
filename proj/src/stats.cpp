#include "erm/stats.hpp"

#include <algorithm>
#include <cmath>

#include "erm/errors.hpp"

namespace erm {

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Estimate mean_and_se(std::span<const double> values) {
  if (values.empty()) throw ContractError("mean_and_se: no samples");
  const double n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / n;
  if (values.size() < 2) return {mean, 0.0};
  std::vector<double> sq(values.size());
  std::ranges::transform(values, sq.begin(), [mean](double v) { return (v - mean) * (v - mean); });
  const double var = pairwise_sum(sq) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

Estimate pth_root_estimate(std::span<const double> powered, double p) {
  const Estimate m = mean_and_se(powered);
  if (m.value <= 0.0) return {0.0, 0.0};
  const double root = std::pow(m.value, 1.0 / p);
  return {root, root / (p * m.value) * m.se};
}

LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size() || x.size() < 2)
    throw ContractError("weighted_line_fit: need >= 2 points of matching length");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw ContractError("weighted_line_fit: x values do not spread");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.slope_se = std::sqrt(1.0 / sxx);
  return fit;
}

double median(std::vector<double> values) {
  if (values.empty()) throw ContractError("median of empty sample");
  std::ranges::sort(values);
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double sign_test_p_value(std::size_t successes, std::size_t n) {
  if (successes > n) throw ContractError("sign test: successes > n");
  if (successes == 0) return 1.0;
  double p = 0.0;
  for (std::size_t k = successes; k <= n; ++k)
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
  return std::min(1.0, p);
}

}  // namespace erm
