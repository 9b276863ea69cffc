#include "erm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "erm/errors.hpp"

namespace erm {

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ContractError(std::string(what) + " must be finite and > 0");
}

void require_box(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b > a)) throw ContractError("box needs finite a < b");
}

void require_norm_order(double p) {
  if (!(p >= 1.0)) throw ContractError("norm order p must lie in [1, inf]");
}

double norm_factor(std::size_t d, double p) {
  return std::isinf(p) ? 1.0 : std::pow(static_cast<double>(d), 1.0 / p);
}

// ||l||_inf + 1
double width_plus_one(const Architecture& arch) { return static_cast<double>(arch.max_width()) + 1.0; }

double depth_of(const Architecture& arch) { return static_cast<double>(arch.depth()); }

// 1 / (L (||l||_inf + 1)^2), the coarse rate exponent.
double coarse_exponent(const Architecture& arch) {
  const double w = width_plus_one(arch);
  return 1.0 / (depth_of(arch) * w * w);
}

BoundReport make_report(std::string id, double approx, double gen, double opt, const BoundInputs& in,
                        std::vector<std::string> warnings) {
  BoundReport r;
  r.formula_id = std::move(id);
  r.approx = approx;
  r.gen = gen;
  r.opt = opt;
  r.total = approx + gen + opt;
  r.warnings = std::move(warnings);
  r.inputs = in;
  return r;
}

}  // namespace

CoveringBound covering_number_bound(std::size_t d, double a, double b, double r, double p) {
  if (d == 0) throw ContractError("dimension d must be >= 1");
  require_box(a, b);
  require_positive(r, "radius r");
  require_norm_order(p);
  const double dd = static_cast<double>(d);
  const double per_axis = std::ceil(norm_factor(d, p) * (b - a) / (2.0 * r));

  CoveringBound out;
  if (per_axis >= 0x1p63) throw CapabilityError("covering grid per-axis count overflows");
  out.per_axis = static_cast<std::size_t>(per_axis);
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (__builtin_mul_overflow(count, static_cast<std::uint64_t>(out.per_axis), &count))
      throw CapabilityError("covering number does not fit in 64 bits");
  }
  out.count = count;

  const double spread = std::isinf(p) ? (b - a) : dd * (b - a);
  out.coarse = r >= spread / 2.0 ? 1.0 : std::pow(spread / r, dd);
  return out;
}

std::vector<std::vector<double>> covering_grid(std::size_t d, double a, double b, std::size_t per_axis) {
  if (d == 0) throw ContractError("dimension d must be >= 1");
  if (per_axis == 0) throw ContractError("grid needs at least one point per axis");
  require_box(a, b);
  double total = std::pow(static_cast<double>(per_axis), static_cast<double>(d));
  if (total > 1e8) throw CapabilityError("covering grid larger than 1e8 points");

  std::vector<double> axis(per_axis);
  const double n = static_cast<double>(per_axis);
  for (std::size_t i = 0; i < per_axis; ++i) axis[i] = a + (static_cast<double>(i) + 0.5) * (b - a) / n;

  std::vector<std::vector<double>> grid;
  grid.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    std::vector<double> pt(d);
    for (std::size_t j = 0; j < d; ++j) pt[j] = axis[idx[j]];
    grid.push_back(std::move(pt));
    std::size_t j = d;
    while (j > 0 && ++idx[j - 1] == per_axis) idx[--j] = 0;
    if (j == 0) break;
  }
  return grid;
}

double covering_radius(std::size_t d, double a, double b, std::size_t per_axis, double p) {
  if (per_axis == 0) throw ContractError("grid needs at least one point per axis");
  require_box(a, b);
  require_norm_order(p);
  return norm_factor(d, p) * (b - a) / (2.0 * static_cast<double>(per_axis));
}

double lp_distance(std::span<const double> x, std::span<const double> y, double p) {
  if (x.size() != y.size()) throw ContractError("lp_distance: length mismatch");
  require_norm_order(p);
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i] - y[i]), p);
  return std::pow(s, 1.0 / p);
}

ParamVector construct_constant_net(const Architecture& arch, double u, double v, double value) {
  if (arch.output_dim() != 1) throw ContractError("constant net needs a scalar-output architecture");
  if (!(v > u)) throw ContractError("clip bounds need v > u");
  if (!(value >= u && value <= v)) throw ContractError("constant value must lie in [u, v]");
  ParamVector theta(arch.param_count());
  theta[arch.param_count() - 1] = value;
  return theta;
}

double constant_net_error_bound(std::size_t d, double L, double a, double b) {
  require_box(a, b);
  if (!(L >= 0.0)) throw ContractError("Lipschitz constant must be >= 0");
  return static_cast<double>(d) * L * (b - a) / 2.0;
}

double approx_bound(std::size_t d, double L, double a, double b, double A) {
  if (d == 0) throw ContractError("dimension d must be >= 1");
  require_box(a, b);
  require_positive(A, "capacity A");
  const double dd = static_cast<double>(d);
  return 3.0 * dd * L * (b - a) / std::pow(A, 1.0 / dd);
}

std::size_t arch_capacity_A(const Architecture& arch) {
  std::size_t A = arch.depth();
  for (std::size_t i = 1; i < arch.depth(); ++i) A = std::min(A, arch.width(i));
  return A;
}

Admissibility arch_admissible_for_A(const Architecture& arch, std::size_t d, double A) {
  if (d == 0) throw ContractError("dimension d must be >= 1");
  require_positive(A, "capacity A");
  const double dd = static_cast<double>(d);
  const double on = A > std::pow(6.0, dd) ? 1.0 : 0.0;
  Admissibility r;
  auto fail = [&r](std::size_t layer, double required, double actual, std::string msg) {
    r.admissible = false;
    r.violated_layer = layer;
    r.required = required;
    r.actual = actual;
    r.message = std::move(msg);
  };

  const double depth = depth_of(arch);
  const double need_depth = A * on / (2.0 * dd) + 1.0;
  if (depth < need_depth) {
    fail(0, need_depth, depth, "depth L = " + std::to_string(arch.depth()) + " is below A*1/(2d) + 1");
    return r;
  }
  if (arch.depth() >= 2) {
    const double need1 = A * on;
    if (static_cast<double>(arch.width(1)) < need1) {
      fail(1, need1, static_cast<double>(arch.width(1)), "layer 1 width is below A");
      return r;
    }
  }
  for (std::size_t i = 2; i < arch.depth(); ++i) {
    const double need = on * std::max(A / dd - 2.0 * static_cast<double>(i) + 3.0, 2.0);
    if (static_cast<double>(arch.width(i)) < need) {
      fail(i, need, static_cast<double>(arch.width(i)),
           "layer " + std::to_string(i) + " width is below max{A/d - 2i + 3, 2}");
      return r;
    }
  }
  return r;
}

FineCoarse generalization_bound(double p, double u, double v, const Architecture& arch, double M, double B,
                                double b) {
  require_positive(p, "moment order p");
  if (!(M >= 1.0)) throw ContractError("M must be >= 1");
  if (!(v > u)) throw ContractError("range needs v > u");
  FineCoarse out;
  if (!(B >= 1.0)) out.warnings.push_back("B < 1");
  if (!(b >= 1.0)) out.warnings.push_back("b < 1");
  if (!(v >= u + 1.0)) out.warnings.push_back("v < u + 1");
  const double L = depth_of(arch);
  const double w = width_plus_one(arch);
  const double range2 = (v - u) * (v - u);
  const double sqrt_m = std::sqrt(M);
  const double log_fine = std::log(4.0 * std::pow(M * b, 1.0 / L) * w * B);
  out.fine = 9.0 * range2 * L * w * std::sqrt(std::max(p, log_fine)) / sqrt_m;
  out.coarse = 9.0 * range2 * L * w * w * std::max(p, std::log(3.0 * M * B * b)) / sqrt_m;
  return out;
}

FineCoarse optimization_bound(double p, double u, double v, const Architecture& arch, double b, double B,
                              double K) {
  require_positive(p, "moment order p");
  if (!(K >= 1.0)) throw ContractError("K must be >= 1");
  if (!(v > u)) throw ContractError("range needs v > u");
  FineCoarse out;
  if (!(B >= 1.0)) out.warnings.push_back("B < 1");
  if (!(b >= 1.0)) out.warnings.push_back("b < 1");
  const double L = depth_of(arch);
  const double dim = static_cast<double>(arch.param_count());
  const double pref = 4.0 * (v - u) * b * L * std::pow(width_plus_one(arch), L) * std::pow(B, L);
  out.fine = pref * std::sqrt(std::max(1.0, p / dim)) / std::pow(K, 1.0 / dim);
  out.coarse = pref * std::max(1.0, p) / std::pow(K, coarse_exponent(arch));
  return out;
}

FineCoarse mmc_bound(double p, double lipschitz, double alpha, double beta, std::size_t dim, double K) {
  require_positive(p, "moment order p");
  if (!(beta > alpha)) throw ContractError("mmc box needs beta > alpha");
  if (!(K >= 1.0)) throw ContractError("K must be >= 1");
  if (dim == 0) throw ContractError("dimension must be >= 1");
  if (!(lipschitz >= 0.0)) throw ContractError("Lipschitz constant must be >= 0");
  const double dd = static_cast<double>(dim);
  const double base = lipschitz * (beta - alpha) / std::pow(K, 1.0 / dd);
  FineCoarse out;
  out.fine = base * std::max(1.0, std::pow(p / dd, 1.0 / dd));
  out.coarse = base * std::max(1.0, p);
  return out;
}

double lipschitz_risk_bound(const Architecture& arch, double u, double v, double b, double B) {
  if (!(v > u)) throw ContractError("range needs v > u");
  return 2.0 * (v - u) * lipschitz_param_bound(arch, b, B);
}

double BoundInputs::capacity() const {
  return A ? *A : static_cast<double>(arch_capacity_A(arch()));
}

std::vector<std::string> main_hypothesis_warnings(const BoundInputs& in) {
  std::vector<std::string> w;
  const Architecture arch = in.arch();
  const double need_c = std::max({1.0, in.L, std::abs(in.a), std::abs(in.b), 2.0 * std::abs(in.u),
                                  2.0 * std::abs(in.v)});
  if (!(in.c >= need_c)) w.push_back("c < max{1, L, |a|, |b|, 2|u|, 2|v|}");
  if (!(in.B >= in.c)) w.push_back("B < c");
  if (arch.input_dim() != in.d) w.push_back("l_0 != d");
  if (arch.output_dim() != 1) w.push_back("l_L != 1");
  if (!(in.M >= 1.0)) w.push_back("M < 1");
  if (!(in.K >= 1.0)) w.push_back("K < 1");
  const Admissibility adm = arch_admissible_for_A(arch, in.d, in.capacity());
  if (!adm.admissible) w.push_back("architecture not admissible for A: " + adm.message);
  return w;
}

namespace {

void check_common(const BoundInputs& in) {
  if (in.d == 0) throw ContractError("dimension d must be >= 1");
  require_box(in.a, in.b);
  if (!(in.v > in.u)) throw ContractError("range needs v > u");
  require_positive(in.c, "c");
  require_positive(in.B, "B");
  require_positive(in.p, "moment order p");
  if (!(in.M >= 1.0)) throw ContractError("M must be >= 1");
  if (!(in.K >= 1.0)) throw ContractError("K must be >= 1");
  require_positive(in.capacity(), "capacity A");
}

}  // namespace

BoundReport overall_bound_main(const BoundInputs& in) {
  check_common(in);
  const Architecture arch = in.arch();
  const double d = static_cast<double>(in.d);
  const double L = depth_of(arch);
  const double w = width_plus_one(arch);
  const double range = in.v - in.u;
  const double approx =
      9.0 * d * d * in.L * in.L * (in.b - in.a) * (in.b - in.a) / std::pow(in.capacity(), 2.0 / d);
  const double opt = 4.0 * range * L * std::pow(w, L) * std::pow(in.c, L + 1.0) * std::max(1.0, in.p) /
                     std::pow(in.K, coarse_exponent(arch));
  const double gen = 18.0 * std::max(1.0, range * range) * L * w * w *
                     std::max(in.p, std::log(3.0 * in.M * in.B * in.c)) / std::sqrt(in.M);
  return make_report("main", approx, gen, opt, in, main_hypothesis_warnings(in));
}

BoundReport overall_bound_main_coarse(const BoundInputs& in) {
  check_common(in);
  const Architecture arch = in.arch();
  const double d = static_cast<double>(in.d);
  const double L = depth_of(arch);
  const double w = width_plus_one(arch);
  const double c = in.c;
  const double approx = 36.0 * d * d * std::pow(c, 4.0) / std::pow(in.capacity(), 2.0 / d);
  const double opt =
      4.0 * L * std::pow(w, L) * std::pow(c, L + 2.0) * std::max(1.0, in.p) / std::pow(in.K, coarse_exponent(arch));
  const double gen = 23.0 * std::pow(in.B, 3.0) * L * w * w *
                     std::max(in.p, std::log(std::numbers::e * in.M)) / std::sqrt(in.M);
  return make_report("main_coarse", approx, gen, opt, in, main_hypothesis_warnings(in));
}

BoundReport overall_bound_intro(std::size_t d, const Architecture& arch, double c, double M, double K,
                                std::optional<double> B, double L) {
  if (d == 0) throw ContractError("dimension d must be >= 1");
  if (!(M >= 1.0)) throw ContractError("M must be >= 1");
  if (!(K >= 1.0)) throw ContractError("K must be >= 1");
  require_positive(c, "c");
  const double cap = B.value_or(c);
  BoundInputs in;
  in.d = d;
  in.widths.assign(arch.widths().begin(), arch.widths().end());
  in.L = L;
  in.a = 0.0;
  in.b = 1.0;
  in.u = 0.0;
  in.v = 1.0;
  in.c = c;
  in.B = cap;
  in.M = M;
  in.K = K;

  std::vector<std::string> warnings;
  if (!(c >= std::max(2.0, L))) warnings.push_back("c < max{2, L}");
  if (!(cap >= c)) warnings.push_back("B < c");
  if (arch.input_dim() != d) warnings.push_back("l_0 != d");
  if (arch.output_dim() != 1) warnings.push_back("l_L != 1");

  const double dd = static_cast<double>(d);
  const double depth = depth_of(arch);
  const double w = width_plus_one(arch);
  const double A = static_cast<double>(arch_capacity_A(arch));
  const double approx = dd * c * c * c / std::pow(A, 1.0 / dd);
  const double gen = cap * cap * cap * depth * w * std::log(std::numbers::e * M) / std::pow(M, 0.25);
  const double opt = depth * std::pow(w, depth) * std::pow(c, depth + 1.0) / std::pow(K, coarse_exponent(arch) / 2.0);
  return make_report("intro", approx, gen, opt, in, std::move(warnings));
}

namespace {

std::vector<std::string> sgd_l1_warnings(const BoundInputs& in) {
  std::vector<std::string> w = main_hypothesis_warnings(in);
  // The expected-L1 form has no admissibility hypothesis; A is the capacity.
  std::erase_if(w, [](const std::string& s) { return s.starts_with("architecture not admissible"); });
  return w;
}

}  // namespace

BoundReport sgd_l1_bound(const BoundInputs& in) {
  BoundInputs fixed = in;
  fixed.A.reset();
  check_common(fixed);
  const Architecture arch = fixed.arch();
  const double d = static_cast<double>(fixed.d);
  const double L = depth_of(arch);
  const double w = width_plus_one(arch);
  const double range = fixed.v - fixed.u;
  const double approx = 3.0 * d * fixed.L * (fixed.b - fixed.a) / std::pow(fixed.capacity(), 1.0 / d);
  const double opt = 2.0 * std::sqrt(range * L * std::pow(w, L) * std::pow(fixed.c, L + 1.0)) /
                     std::pow(fixed.K, coarse_exponent(arch) / 2.0);
  const double gen = 3.0 * std::max(1.0, range) * w * std::sqrt(2.0 * L * std::log(3.0 * fixed.M * fixed.B * fixed.c)) /
                     std::pow(fixed.M, 0.25);
  return make_report("sgd_l1", approx, gen, opt, fixed, sgd_l1_warnings(fixed));
}

BoundReport sgd_l1_bound_coarse(const BoundInputs& in) {
  BoundInputs fixed = in;
  fixed.A.reset();
  check_common(fixed);
  const Architecture arch = fixed.arch();
  const double d = static_cast<double>(fixed.d);
  const double L = depth_of(arch);
  const double w = width_plus_one(arch);
  const double c = fixed.c;
  const double approx = 6.0 * d * c * c / std::pow(fixed.capacity(), 1.0 / d);
  const double gen = 5.0 * fixed.B * fixed.B * L * w * std::log(std::numbers::e * fixed.M) / std::pow(fixed.M, 0.25);
  const double opt = 2.0 * L * std::pow(w, L) * std::pow(c, L + 1.0) / std::pow(fixed.K, coarse_exponent(arch) / 2.0);
  return make_report("sgd_l1_coarse", approx, gen, opt, fixed, sgd_l1_warnings(fixed));
}

LnCheck ln_reduction_check(double M, double B, double c) {
  if (!(M >= 1.0) || !(c >= 1.0) || !(B >= c)) throw ContractError("ln check needs M, c >= 1 and B >= c");
  LnCheck r;
  r.lhs = std::log(3.0 * M * B * c);
  r.rhs = 23.0 * B / 18.0 * std::log(std::numbers::e * M);
  r.holds = r.lhs <= r.rhs;
  return r;
}

double mc_lp_bound(double p, double M, double max_centered_norm) {
  if (!(p >= 2.0)) throw ContractError("mc_lp_bound needs p >= 2");
  if (!(M >= 1.0)) throw ContractError("M must be >= 1");
  if (!(max_centered_norm >= 0.0)) throw ContractError("centered norm must be >= 0");
  return 2.0 * std::sqrt(p - 1.0) / std::sqrt(M) * max_centered_norm;
}

}  // namespace erm
