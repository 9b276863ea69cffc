#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "erm/net.hpp"

namespace erm {

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

struct CoveringBound {
  std::uint64_t count = 0;   // ceil(d^{1/p} (b-a) / (2r))^d, p = inf drops d^{1/p}
  double coarse = 0.0;       // 1 if r is large enough, else (d (b-a) / r)^d
  std::size_t per_axis = 0;  // grid points per axis realizing `count`
};

// p in [1, inf]; pass kInfNorm for the sup-norm. Throws CapabilityError when
// the count does not fit in 64 bits.
CoveringBound covering_number_bound(std::size_t d, double a, double b, double r, double p);

// N^d product grid of per-axis midpoints a + (i - 1/2)(b - a)/N, i = 1..N,
// in lexicographic order (last coordinate fastest).
std::vector<std::vector<double>> covering_grid(std::size_t d, double a, double b, std::size_t per_axis);

// Radius in p-norm at which covering_grid(d, a, b, N) covers [a, b]^d.
double covering_radius(std::size_t d, double a, double b, std::size_t per_axis, double p);

double lp_distance(std::span<const double> x, std::span<const double> y, double p);

// theta with every entry 0 except the last output bias, which holds `value`;
// the net then computes the constant `value`.
ParamVector construct_constant_net(const Architecture& arch, double u, double v, double value);

// d L (b - a) / 2, the sup error of the constant net at the box midpoint.
double constant_net_error_bound(std::size_t d, double L, double a, double b);

double approx_bound(std::size_t d, double L, double a, double b, double A);

// min of the depth and the hidden widths l_1..l_{L-1}.
std::size_t arch_capacity_A(const Architecture& arch);

struct Admissibility {
  bool admissible = true;
  // Violated constraint: 0 for the depth condition, i >= 1 for width l_i.
  std::optional<std::size_t> violated_layer;
  double required = 0.0;
  double actual = 0.0;
  std::string message;
};

Admissibility arch_admissible_for_A(const Architecture& arch, std::size_t d, double A);

struct FineCoarse {
  double fine = 0.0;
  double coarse = 0.0;
  std::vector<std::string> warnings;
};

FineCoarse generalization_bound(double p, double u, double v, const Architecture& arch, double M, double B, double b);
// fine uses exponent 1/dim with dim = param_count, coarse 1/(L (||l||+1)^2).
FineCoarse optimization_bound(double p, double u, double v, const Architecture& arch, double b, double B, double K);
FineCoarse mmc_bound(double p, double lipschitz, double alpha, double beta, std::size_t dim, double K);
double lipschitz_risk_bound(const Architecture& arch, double u, double v, double b, double B);

struct BoundInputs {
  std::size_t d = 1;
  std::vector<std::size_t> widths{1, 1};
  double L = 1.0;
  double a = 0.0;
  double b = 1.0;
  double u = 0.0;
  double v = 1.0;
  double c = 1.0;
  double B = 1.0;
  double M = 1.0;
  double K = 1.0;
  double p = 1.0;
  std::optional<double> A;  // defaults to arch_capacity_A

  Architecture arch() const { return Architecture(widths); }
  double capacity() const;
  bool operator==(const BoundInputs&) const = default;
};

struct BoundReport {
  std::string formula_id;
  double approx = 0.0;
  double gen = 0.0;
  double opt = 0.0;
  double total = 0.0;
  std::vector<std::string> warnings;
  BoundInputs inputs;
};

// Three-term bound on the L^p norm of the squared L2 error ("main"), and its
// coarser companion ("main_coarse").
BoundReport overall_bound_main(const BoundInputs& in);
BoundReport overall_bound_main_coarse(const BoundInputs& in);
// Expected L1 error bound with c >= max{2, L} on [0,1]^d, range [0,1]; the
// cap B defaults to c.
BoundReport overall_bound_intro(std::size_t d, const Architecture& arch, double c, double M, double K,
                                std::optional<double> B = std::nullopt, double L = 0.0);
// Expected L1 error bound on [a,b]^d with range [u,v] and cap B, and its
// coarser companion.
BoundReport sgd_l1_bound(const BoundInputs& in);
BoundReport sgd_l1_bound_coarse(const BoundInputs& in);

struct LnCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// ln(3 M B c) <= (23 B / 18) ln(e M).
LnCheck ln_reduction_check(double M, double B, double c);

double mc_lp_bound(double p, double M, double max_centered_norm);

// Hypothesis violations of the main bound for `in`; empty when all hold.
std::vector<std::string> main_hypothesis_warnings(const BoundInputs& in);

}  // namespace erm
