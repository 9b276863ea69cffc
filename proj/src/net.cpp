#include "erm/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "erm/errors.hpp"

namespace erm {

Architecture::Architecture(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw ContractError("architecture needs at least one layer (L >= 1)");
  if (std::ranges::any_of(widths_, [](std::size_t w) { return w == 0; }))
    throw ContractError("architecture widths must be >= 1");
  offsets_.reserve(widths_.size());
  offsets_.push_back(0);
  for (std::size_t i = 1; i < widths_.size(); ++i)
    offsets_.push_back(offsets_.back() + widths_[i] * (widths_[i - 1] + 1));
}

std::size_t Architecture::max_width() const { return *std::ranges::max_element(widths_); }

std::size_t param_count(const Architecture& arch) { return arch.param_count(); }

double ParamVector::sup_norm() const {
  double m = 0.0;
  for (double t : values_) {
    if (std::isnan(t)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(t));
  }
  return m;
}

ClippedNet::ClippedNet(Architecture arch, double u, double v) : arch_(std::move(arch)), u_(u), v_(v) {
  if (!std::isfinite(u) || !std::isfinite(v)) throw ContractError("clip bounds must be finite");
  if (!(v > u)) throw ContractError("clip bounds need v > u");
}

void require_finite(std::span<const double> values, const char* what) {
  for (double x : values)
    if (!std::isfinite(x)) throw ContractError(std::string(what) + " contains a non-finite value");
}

std::vector<double> affine_apply(std::span<const double> theta, std::size_t offset, std::size_t out_dim,
                                 std::size_t in_dim, std::span<const double> x) {
  if (x.size() != in_dim) throw ContractError("affine_apply: input length differs from in_dim");
  if (theta.size() < offset + out_dim * in_dim + out_dim)
    throw ContractError("affine_apply: parameter vector too short for offset and shape");
  std::vector<double> out(out_dim);
  const double* w = theta.data() + offset;
  const double* bias = w + out_dim * in_dim;
  for (std::size_t r = 0; r < out_dim; ++r) {
    double acc = 0.0;
    for (std::size_t q = 0; q < in_dim; ++q) acc += w[r * in_dim + q] * x[q];
    out[r] = acc + bias[r];
  }
  return out;
}

std::vector<double> relu_vec(std::span<const double> x) {
  std::vector<double> out(x.size());
  std::ranges::transform(x, out.begin(), [](double t) { return relu(t); });
  return out;
}

double clip(double u, double v, double x) {
  if (!(v > u)) throw ContractError("clip: need v > u");
  return std::max(u, std::min(x, v));
}

std::vector<double> forward(const ClippedNet& net, const ParamVector& theta, std::span<const double> x) {
  const auto& arch = net.arch();
  if (x.size() != arch.input_dim()) throw ContractError("forward: input length differs from l_0");
  if (theta.size() < arch.param_count()) throw ContractError("forward: parameter vector shorter than param_count");
  require_finite(x, "forward input");
  require_finite(theta.values().first(arch.param_count()), "parameter vector");

  std::vector<double> out(arch.output_dim());
  NetEvaluator eval(net);
  eval.evaluate(theta.values(), x, out);
  return out;
}

double lipschitz_param_bound(const Architecture& arch, double b, double B) {
  if (!(b >= 1.0) || !(B >= 1.0)) throw ContractError("lipschitz_param_bound needs b >= 1 and B >= 1");
  const double depth = static_cast<double>(arch.depth());
  const double w = static_cast<double>(arch.max_width()) + 1.0;
  return b * depth * std::pow(w, depth) * std::pow(B, depth - 1.0);
}

NetEvaluator::NetEvaluator(const ClippedNet& net) : net_(&net) {
  const auto widths = net.arch().widths();
  for (std::size_t w : widths) {
    pre_.emplace_back(w);
    post_.emplace_back(w);
  }
  const std::size_t widest = net.arch().max_width();
  delta_.resize(widest);
  delta_prev_.resize(widest);
}

void NetEvaluator::run(std::span<const double> theta, std::span<const double> x) {
  const auto& arch = net_->arch();
  const std::size_t depth = arch.depth();
  std::copy(x.begin(), x.end(), post_[0].begin());
  for (std::size_t i = 1; i <= depth; ++i) {
    const std::size_t in = arch.width(i - 1);
    const std::size_t out = arch.width(i);
    const double* w = theta.data() + arch.layer_offset(i);
    const double* bias = w + out * in;
    const double* src = post_[i - 1].data();
    double* z = pre_[i].data();
    double* a = post_[i].data();
    for (std::size_t r = 0; r < out; ++r) {
      double acc = 0.0;
      const double* row = w + r * in;
      for (std::size_t q = 0; q < in; ++q) acc += row[q] * src[q];
      z[r] = acc + bias[r];
      if (i < depth) {
        a[r] = z[r] > 0.0 ? z[r] : 0.0;
      } else {
        a[r] = std::max(net_->lower(), std::min(z[r], net_->upper()));
      }
    }
  }
}

double NetEvaluator::operator()(std::span<const double> theta, std::span<const double> x) {
  run(theta, x);
  return post_.back()[0];
}

void NetEvaluator::evaluate(std::span<const double> theta, std::span<const double> x, std::span<double> out) {
  run(theta, x);
  std::copy(post_.back().begin(), post_.back().end(), out.begin());
}

double NetEvaluator::accumulate_gradient(std::span<const double> theta, std::span<const double> x, double scale,
                                         std::span<double> grad) {
  run(theta, x);
  const auto& arch = net_->arch();
  const std::size_t depth = arch.depth();
  const double z_out = pre_[depth][0];
  const double y = post_[depth][0];
  if (!(z_out > net_->lower() && z_out < net_->upper())) return y;

  delta_[0] = scale;
  for (std::size_t i = depth; i >= 1; --i) {
    const std::size_t in = arch.width(i - 1);
    const std::size_t out = arch.width(i);
    const std::size_t off = arch.layer_offset(i);
    const double* src = post_[i - 1].data();
    double* gw = grad.data() + off;
    double* gb = gw + out * in;
    for (std::size_t r = 0; r < out; ++r) {
      const double dr = delta_[r];
      if (dr == 0.0) continue;
      for (std::size_t q = 0; q < in; ++q) gw[r * in + q] += dr * src[q];
      gb[r] += dr;
    }
    if (i == 1) break;
    const double* w = theta.data() + off;
    const double* z_prev = pre_[i - 1].data();
    for (std::size_t q = 0; q < in; ++q) {
      double acc = 0.0;
      if (z_prev[q] > 0.0)
        for (std::size_t r = 0; r < out; ++r) acc += w[r * in + q] * delta_[r];
      delta_prev_[q] = acc;
    }
    std::swap(delta_, delta_prev_);
  }
  return y;
}

}  // namespace erm
