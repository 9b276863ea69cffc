#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace erm {

/// Layer widths l = (l_0, ..., l_L) of a fully connected network.
///
/// Layer i (1-based, i = 1..L) maps R^{l_{i-1}} to R^{l_i}. Its parameters
/// start at offset s_i = sum_{j<i} l_j (l_{j-1} + 1) of the flat parameter
/// vector: first l_i * l_{i-1} weights in row-major order, then l_i biases.
/// Storage is 0-based, so the 1-based index s_i + (r-1) l_{i-1} + q
/// becomes s_i + (r-1) l_{i-1} + (q-1).
class Architecture {
 public:
  explicit Architecture(std::vector<std::size_t> widths);

  std::size_t depth() const { return widths_.size() - 1; }
  std::size_t width(std::size_t i) const { return widths_.at(i); }
  std::span<const std::size_t> widths() const { return widths_; }
  std::size_t input_dim() const { return widths_.front(); }
  std::size_t output_dim() const { return widths_.back(); }
  // ||l||_inf over all widths including input and output.
  std::size_t max_width() const;
  // Offset of layer i (1-based) in the flat parameter vector.
  std::size_t layer_offset(std::size_t layer) const { return offsets_.at(layer - 1); }
  std::size_t param_count() const { return offsets_.back(); }

  bool operator==(const Architecture&) const = default;

 private:
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;  // L + 1 entries, last one is the total
};

std::size_t param_count(const Architecture& arch);

/// Flat parameter vector theta. May be longer than param_count(arch); the
/// trailing entries are inert.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t size) : values_(size, 0.0) {}
  explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const std::vector<double>& vector() const { return values_; }

  // NaN entries count as infinite, so a diverged vector is never in a box.
  double sup_norm() const;
  bool in_box(double cap) const { return sup_norm() <= cap; }

  bool operator==(const ParamVector&) const = default;

 private:
  std::vector<double> values_;
};

/// Rectified clipped network: ReLU after every hidden layer, clip to [u, v]
/// after the output layer.
class ClippedNet {
 public:
  ClippedNet(Architecture arch, double u, double v);

  const Architecture& arch() const { return arch_; }
  double lower() const { return u_; }
  double upper() const { return v_; }

 private:
  Architecture arch_;
  double u_;
  double v_;
};

std::vector<double> affine_apply(std::span<const double> theta, std::size_t offset, std::size_t out_dim,
                                 std::size_t in_dim, std::span<const double> x);

inline double relu(double x) { return x > 0.0 ? x : 0.0; }
std::vector<double> relu_vec(std::span<const double> x);

double clip(double u, double v, double x);

std::vector<double> forward(const ClippedNet& net, const ParamVector& theta, std::span<const double> x);

// Uniform Lipschitz constant (parameters in sup-norm) of theta -> forward(theta, x)
// over x in [-b, b]^d and theta in [-B, B]^dim: b L (||l||_inf + 1)^L B^{L-1}.
double lipschitz_param_bound(const Architecture& arch, double b, double B);

/// Allocation-free evaluator for hot loops. Checks nothing; callers validate
/// dimensions and finiteness once at their own boundary. Not thread-safe:
/// give each thread its own instance.
class NetEvaluator {
 public:
  explicit NetEvaluator(const ClippedNet& net);

  const ClippedNet& net() const { return *net_; }

  // Scalar output (l_L must be 1).
  double operator()(std::span<const double> theta, std::span<const double> x);

  // Writes all l_L outputs into out.
  void evaluate(std::span<const double> theta, std::span<const double> x, std::span<double> out);

  // Accumulates scale * d(clipped output)/d(theta) into grad for a scalar-output
  // net, using relu'(0) = 0 and clip' = 1 only strictly inside (u, v).
  // Returns the clipped output.
  double accumulate_gradient(std::span<const double> theta, std::span<const double> x, double scale,
                             std::span<double> grad);

 private:
  const ClippedNet* net_;
  std::vector<std::vector<double>> pre_;   // pre-activations per layer
  std::vector<std::vector<double>> post_;  // activations per layer, post_[0] = input
  std::vector<double> delta_;
  std::vector<double> delta_prev_;

  void run(std::span<const double> theta, std::span<const double> x);
};

void require_finite(std::span<const double> values, const char* what);

}  // namespace erm
