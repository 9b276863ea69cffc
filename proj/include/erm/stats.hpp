#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace erm {

// Monte Carlo estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;

  bool operator==(const Estimate&) const = default;
};

// Sum with a fixed reduction tree (halve until blocks of <= 8, then left to
// right). The result depends only on the values and their order.
double pairwise_sum(std::span<const double> values);

// Sample mean and standard error of the mean (n >= 2 for a nonzero SE).
Estimate mean_and_se(std::span<const double> values);

// (E|Z|^p)^{1/p} from samples of |Z|^p, SE by the delta method on the p-th root.
Estimate pth_root_estimate(std::span<const double> powered, double p);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

// Weighted least squares of y on x with weights w (w_i = 1 / var(y_i)).
LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w);

double median(std::vector<double> values);

// P(Bin(n, 1/2) >= successes).
double sign_test_p_value(std::size_t successes, std::size_t n);

}  // namespace erm
