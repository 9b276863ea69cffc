#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "erm/net.hpp"
#include "erm/rng.hpp"
#include "erm/stats.hpp"

namespace erm {

struct Sample {
  std::vector<double> x;
  double y = 0.0;

  bool operator==(const Sample&) const = default;
};

// The cube [lo, hi]^dim.
struct Box {
  std::size_t dim = 1;
  double lo = 0.0;
  double hi = 1.0;

  bool contains(std::span<const double> x) const;
  // Uniform point of the cube; draws dim values from the stream.
  std::vector<double> draw(Stream& stream) const;
  void draw(Stream& stream, std::span<double> out) const;

  bool operator==(const Box&) const = default;
};

struct AffinePiece {
  std::vector<double> weights;
  double offset = 0.0;

  bool operator==(const AffinePiece&) const = default;
};

/// Lipschitz target E(x) = clip(max_k (w_k . x + o_k), lo, hi).
/// A single piece is the affine-clipped kind. The declared constant L bounds
/// |E(x) - E(y)| <= L ||x - y||_1 and must be >= max_k ||w_k||_inf.
class TargetFn {
 public:
  enum class Kind { affine_clipped, max_affine };

  static TargetFn affine_clipped(std::vector<double> weights, double offset, double lo, double hi);
  static TargetFn max_affine(std::vector<AffinePiece> pieces, double lo, double hi);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return pieces_.front().weights.size(); }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  double lipschitz() const { return lipschitz_; }
  // Raise the declared Lipschitz constant (must not go below the computed one).
  TargetFn& declare_lipschitz(double L);

  double operator()(std::span<const double> x) const;

  bool operator==(const TargetFn&) const = default;

 private:
  TargetFn(Kind kind, std::vector<AffinePiece> pieces, double lo, double hi);

  Kind kind_;
  std::vector<AffinePiece> pieces_;
  double lo_;
  double hi_;
  double lipschitz_;
};

/// Synthetic data: X uniform on the box, Y = E(X) + eta with eta uniform on
/// {-noise, +noise} (noise = 0 for the noiseless model). Requires
/// [target.lower - noise, target.upper + noise] inside [label_lo, label_hi], so
/// labels never need clipping and E[Y | X] = E(X) exactly.
struct DataModel {
  Box box;
  TargetFn target;
  double noise = 0.0;
  double label_lo = 0.0;
  double label_hi = 1.0;

  void validate() const;
  Sample sample(Stream& stream) const;
  std::vector<Sample> sample_batch(std::size_t n, Stream& stream) const;
};

double empirical_risk(const ClippedNet& net, const ParamVector& theta, std::span<const Sample> batch);

// Gradient of empirical_risk; relu'(0) = 0, clip' = 0 outside the open
// interval (u, v). Tail entries beyond param_count receive 0.
std::vector<double> generalized_gradient(const ClippedNet& net, const ParamVector& theta,
                                         std::span<const Sample> batch);

struct FiniteDiffResult {
  std::vector<double> gradient;
  // Coordinates whose second difference |f(t+h) + f(t-h) - 2 f(t)| exceeds
  // kink_curvature * h^2, i.e. a kink is likely within h.
  std::vector<bool> near_kink;
};

inline constexpr double kDefaultFiniteDiffStep = 1e-6;
inline constexpr double kDefaultKinkCurvature = 1e4;

FiniteDiffResult finite_diff_gradient(const ClippedNet& net, const ParamVector& theta, std::span<const Sample> batch,
                                      double h = kDefaultFiniteDiffStep,
                                      double kink_curvature = kDefaultKinkCurvature);

// Monte Carlo E|N(X) - E(X)|^2 and E|N(X) - E(X)| for X uniform on the box.
Estimate l2_error_mc(const ClippedNet& net, const ParamVector& theta, const TargetFn& target, const Box& box,
                     std::size_t n_mc, Stream& stream);
Estimate l1_error_mc(const ClippedNet& net, const ParamVector& theta, const TargetFn& target, const Box& box,
                     std::size_t n_mc, Stream& stream);
// Monte Carlo E|N(X) - Y|^2 over fresh pairs from the model.
Estimate true_risk_mc(const ClippedNet& net, const ParamVector& theta, const DataModel& model, std::size_t n_mc,
                      Stream& stream);

/// Exact E|N(X) - E(X)|^2 for X uniform on the box, for single-layer nets
/// (architecture (d, 1)) and d <= 2. Both functions are affine on the cells cut
/// out by finitely many lines, so the integrand is a quadratic polynomial per
/// cell and piecewise Simpson is exact. Throws CapabilityError otherwise.
double exact_l2_error(const ClippedNet& net, const ParamVector& theta, const TargetFn& target, const Box& box);
// exact_l2_error + noise^2.
double exact_true_risk(const ClippedNet& net, const ParamVector& theta, const DataModel& model);
bool exact_risk_supported(const ClippedNet& net, const Box& box);

// Dataset CSV: header x0,...,x{d-1},y then one row per sample. Reading
// validates x in the box and y in [label_lo, label_hi].
std::vector<Sample> read_dataset_csv(std::istream& in, const Box& box, double label_lo, double label_hi);
std::vector<Sample> read_dataset_csv(const std::string& path, const Box& box, double label_lo, double label_hi);
void write_dataset_csv(std::ostream& out, std::span<const Sample> samples);

namespace detail {
// Unchecked risk evaluation for hot loops.
double empirical_risk(NetEvaluator& eval, std::span<const double> theta, std::span<const Sample> batch);
void check_batch(const ClippedNet& net, const ParamVector& theta, std::span<const Sample> batch);
}  // namespace detail

}  // namespace erm
