#include "erm/risk.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "erm/errors.hpp"

namespace erm {

bool Box::contains(std::span<const double> x) const {
  if (x.size() != dim) return false;
  return std::ranges::all_of(x, [this](double t) { return t >= lo && t <= hi; });
}

std::vector<double> Box::draw(Stream& stream) const {
  std::vector<double> x(dim);
  draw(stream, x);
  return x;
}

void Box::draw(Stream& stream, std::span<double> out) const {
  for (auto& t : out) t = stream.uniform(lo, hi);
}

TargetFn::TargetFn(Kind kind, std::vector<AffinePiece> pieces, double lo, double hi)
    : kind_(kind), pieces_(std::move(pieces)), lo_(lo), hi_(hi), lipschitz_(0.0) {
  if (pieces_.empty()) throw ContractError("target needs at least one affine piece");
  if (!(hi_ > lo_)) throw ContractError("target range needs hi > lo");
  const std::size_t d = pieces_.front().weights.size();
  if (d == 0) throw ContractError("target input dimension must be >= 1");
  for (const auto& p : pieces_) {
    if (p.weights.size() != d) throw ContractError("target pieces differ in input dimension");
    require_finite(p.weights, "target weights");
    if (!std::isfinite(p.offset)) throw ContractError("target offset is not finite");
    for (double w : p.weights) lipschitz_ = std::max(lipschitz_, std::abs(w));
  }
}

TargetFn TargetFn::affine_clipped(std::vector<double> weights, double offset, double lo, double hi) {
  return TargetFn(Kind::affine_clipped, {AffinePiece{std::move(weights), offset}}, lo, hi);
}

TargetFn TargetFn::max_affine(std::vector<AffinePiece> pieces, double lo, double hi) {
  return TargetFn(Kind::max_affine, std::move(pieces), lo, hi);
}

TargetFn& TargetFn::declare_lipschitz(double L) {
  if (L < lipschitz_) throw ContractError("declared Lipschitz constant is below the weights' sup-norm");
  lipschitz_ = L;
  return *this;
}

double TargetFn::operator()(std::span<const double> x) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pieces_) {
    double acc = p.offset;
    for (std::size_t i = 0; i < x.size(); ++i) acc += p.weights[i] * x[i];
    best = std::max(best, acc);
  }
  return std::max(lo_, std::min(best, hi_));
}

void DataModel::validate() const {
  if (!(box.hi > box.lo)) throw ContractError("data box needs hi > lo");
  if (target.dim() != box.dim) throw ContractError("target dimension differs from box dimension");
  if (!(noise >= 0.0)) throw ContractError("noise level must be >= 0");
  if (target.lower() - noise < label_lo || target.upper() + noise > label_hi)
    throw ContractError("target range widened by the noise must stay inside the label range");
}

Sample DataModel::sample(Stream& stream) const {
  Sample s;
  s.x = box.draw(stream);
  s.y = target(s.x);
  if (noise > 0.0) s.y += (stream() >> 63) ? noise : -noise;
  return s;
}

std::vector<Sample> DataModel::sample_batch(std::size_t n, Stream& stream) const {
  std::vector<Sample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample(stream));
  return out;
}

namespace detail {

void check_batch(const ClippedNet& net, const ParamVector& theta, std::span<const Sample> batch) {
  const auto& arch = net.arch();
  if (batch.empty()) throw ContractError("empty batch");
  if (arch.output_dim() != 1) throw ContractError("risk needs a scalar-output architecture");
  if (theta.size() < arch.param_count()) throw ContractError("parameter vector shorter than param_count");
  require_finite(theta.values().first(arch.param_count()), "parameter vector");
  for (const auto& s : batch) {
    if (s.x.size() != arch.input_dim()) throw ContractError("sample input length differs from l_0");
    require_finite(s.x, "sample input");
    if (!std::isfinite(s.y)) throw ContractError("sample label is not finite");
  }
}

double empirical_risk(NetEvaluator& eval, std::span<const double> theta, std::span<const Sample> batch) {
  double acc = 0.0;
  for (const auto& s : batch) {
    const double r = eval(theta, s.x) - s.y;
    acc += r * r;
  }
  return acc / static_cast<double>(batch.size());
}

}  // namespace detail

double empirical_risk(const ClippedNet& net, const ParamVector& theta, std::span<const Sample> batch) {
  detail::check_batch(net, theta, batch);
  NetEvaluator eval(net);
  return detail::empirical_risk(eval, theta.values(), batch);
}

std::vector<double> generalized_gradient(const ClippedNet& net, const ParamVector& theta,
                                         std::span<const Sample> batch) {
  detail::check_batch(net, theta, batch);
  std::vector<double> grad(theta.size(), 0.0);
  NetEvaluator eval(net);
  const double inv_j = 1.0 / static_cast<double>(batch.size());
  for (const auto& s : batch) {
    // d/dθ (N - y)^2 / J = 2 (N - y) / J * dN/dθ; the residual needs N first.
    const double out = eval(theta.values(), s.x);
    const double scale = 2.0 * (out - s.y) * inv_j;
    if (scale != 0.0) eval.accumulate_gradient(theta.values(), s.x, scale, grad);
  }
  return grad;
}

FiniteDiffResult finite_diff_gradient(const ClippedNet& net, const ParamVector& theta, std::span<const Sample> batch,
                                      double h, double kink_curvature) {
  if (!(h > 0.0)) throw ContractError("finite difference step must be > 0");
  detail::check_batch(net, theta, batch);
  NetEvaluator eval(net);
  std::vector<double> work(theta.vector());
  const double center = detail::empirical_risk(eval, work, batch);
  FiniteDiffResult result{std::vector<double>(work.size(), 0.0), std::vector<bool>(work.size(), false)};
  for (std::size_t i = 0; i < work.size(); ++i) {
    const double saved = work[i];
    work[i] = saved + h;
    const double plus = detail::empirical_risk(eval, work, batch);
    work[i] = saved - h;
    const double minus = detail::empirical_risk(eval, work, batch);
    work[i] = saved;
    result.gradient[i] = (plus - minus) / (2.0 * h);
    result.near_kink[i] = std::abs(plus + minus - 2.0 * center) > kink_curvature * h * h;
  }
  return result;
}

namespace {

template <class Integrand>
Estimate error_mc(const ClippedNet& net, const ParamVector& theta, const TargetFn& target, const Box& box,
                  std::size_t n_mc, Stream& stream, Integrand integrand) {
  if (n_mc < 2) throw ContractError("Monte Carlo estimate needs n_mc >= 2");
  if (target.dim() != box.dim || net.arch().input_dim() != box.dim)
    throw ContractError("net, target and box dimensions differ");
  if (theta.size() < net.arch().param_count()) throw ContractError("parameter vector shorter than param_count");
  require_finite(theta.values().first(net.arch().param_count()), "parameter vector");
  NetEvaluator eval(net);
  std::vector<double> values(n_mc);
  std::vector<double> x(box.dim);
  for (auto& v : values) {
    box.draw(stream, x);
    v = integrand(eval(theta.values(), x) - target(x));
  }
  return mean_and_se(values);
}

}  // namespace

Estimate l2_error_mc(const ClippedNet& net, const ParamVector& theta, const TargetFn& target, const Box& box,
                     std::size_t n_mc, Stream& stream) {
  return error_mc(net, theta, target, box, n_mc, stream, [](double r) { return r * r; });
}

Estimate l1_error_mc(const ClippedNet& net, const ParamVector& theta, const TargetFn& target, const Box& box,
                     std::size_t n_mc, Stream& stream) {
  return error_mc(net, theta, target, box, n_mc, stream, [](double r) { return std::abs(r); });
}

Estimate true_risk_mc(const ClippedNet& net, const ParamVector& theta, const DataModel& model, std::size_t n_mc,
                      Stream& stream) {
  if (n_mc < 2) throw ContractError("Monte Carlo estimate needs n_mc >= 2");
  model.validate();
  if (net.arch().input_dim() != model.box.dim) throw ContractError("net and data model dimensions differ");
  if (theta.size() < net.arch().param_count()) throw ContractError("parameter vector shorter than param_count");
  require_finite(theta.values().first(net.arch().param_count()), "parameter vector");
  NetEvaluator eval(net);
  std::vector<double> values(n_mc);
  for (auto& v : values) {
    const Sample s = model.sample(stream);
    const double r = eval(theta.values(), s.x) - s.y;
    v = r * r;
  }
  return mean_and_se(values);
}

// ---------------------------------------------------------------------------
// Exact L2 error for single-layer nets.

namespace {

// c1 x1 + c2 x2 + c0 = 0 (c2 unused when d = 1).
struct Line {
  double c1, c2, c0;
};

std::vector<Line> cell_lines(const ClippedNet& net, std::span<const double> theta, const TargetFn& target) {
  const std::size_t d = net.arch().input_dim();
  auto coef = [d](std::span<const double> w, double off) {
    return Line{w[0], d > 1 ? w[1] : 0.0, off};
  };
  std::vector<Line> lines;
  const std::span<const double> w = theta.first(d);
  const double bias = theta[d];
  lines.push_back(coef(w, bias - net.lower()));
  lines.push_back(coef(w, bias - net.upper()));
  const auto& pieces = target.pieces();
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    lines.push_back(coef(pieces[k].weights, pieces[k].offset - target.lower()));
    lines.push_back(coef(pieces[k].weights, pieces[k].offset - target.upper()));
    for (std::size_t j = k + 1; j < pieces.size(); ++j) {
      std::vector<double> dw(d);
      for (std::size_t i = 0; i < d; ++i) dw[i] = pieces[k].weights[i] - pieces[j].weights[i];
      lines.push_back(coef(dw, pieces[k].offset - pieces[j].offset));
    }
  }
  return lines;
}

void sort_unique_inside(std::vector<double>& pts, double lo, double hi) {
  std::erase_if(pts, [lo, hi](double t) { return !(t > lo && t < hi); });
  pts.push_back(lo);
  pts.push_back(hi);
  std::ranges::sort(pts);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

template <class F>
double piecewise_simpson(const std::vector<double>& knots, F&& f) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double l = knots[i], r = knots[i + 1];
    total += (r - l) / 6.0 * (f(l) + 4.0 * f(0.5 * (l + r)) + f(r));
  }
  return total;
}

}  // namespace

bool exact_risk_supported(const ClippedNet& net, const Box& box) {
  return net.arch().depth() == 1 && net.arch().output_dim() == 1 && box.dim <= 2 && box.dim == net.arch().input_dim();
}

double exact_l2_error(const ClippedNet& net, const ParamVector& theta, const TargetFn& target, const Box& box) {
  if (!exact_risk_supported(net, box))
    throw CapabilityError("exact L2 error needs a single-layer net with input dimension <= 2");
  if (target.dim() != box.dim) throw ContractError("target and box dimensions differ");
  if (theta.size() < net.arch().param_count()) throw ContractError("parameter vector shorter than param_count");
  require_finite(theta.values().first(net.arch().param_count()), "parameter vector");

  const std::size_t d = box.dim;
  const std::span<const double> th = theta.values();
  const std::vector<Line> lines = cell_lines(net, th, target);
  const double a = box.lo, b = box.hi;

  auto integrand = [&](double x1, double x2) {
    const double pt[2] = {x1, x2};
    double z = th[d];
    for (std::size_t i = 0; i < d; ++i) z += th[i] * pt[i];
    const double r = std::max(net.lower(), std::min(z, net.upper())) - target(std::span<const double>(pt, d));
    return r * r;
  };

  // Integral over x1 in [a, b] at fixed x2.
  std::vector<double> knots;
  auto inner = [&](double x2) {
    knots.clear();
    for (const auto& ln : lines)
      if (ln.c1 != 0.0) knots.push_back(-(ln.c0 + ln.c2 * x2) / ln.c1);
    sort_unique_inside(knots, a, b);
    return piecewise_simpson(knots, [&](double x1) { return integrand(x1, x2); });
  };

  const double width = b - a;
  if (d == 1) return inner(0.0) / width;

  // Outer knots: where the x1-order of inner knots or their position relative
  // to the box edges can change. Between them the inner integral is a cubic.
  std::vector<double> outer;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Line& li = lines[i];
    if (li.c1 == 0.0) {
      if (li.c2 != 0.0) outer.push_back(-li.c0 / li.c2);
      continue;
    }
    if (li.c2 != 0.0) {
      outer.push_back(-(li.c0 + li.c1 * a) / li.c2);
      outer.push_back(-(li.c0 + li.c1 * b) / li.c2);
    }
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const Line& lj = lines[j];
      if (lj.c1 == 0.0) continue;
      const double pi = -li.c0 / li.c1, qi = -li.c2 / li.c1;
      const double pj = -lj.c0 / lj.c1, qj = -lj.c2 / lj.c1;
      if (qi != qj) outer.push_back((pj - pi) / (qi - qj));
    }
  }
  sort_unique_inside(outer, a, b);
  return piecewise_simpson(outer, inner) / (width * width);
}

double exact_true_risk(const ClippedNet& net, const ParamVector& theta, const DataModel& model) {
  return exact_l2_error(net, theta, model.target, model.box) + model.noise * model.noise;
}

// ---------------------------------------------------------------------------
// Dataset CSV.

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    fields.push_back(field);
  }
  return fields;
}

double parse_double(const std::string& s, std::size_t row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    throw ContractError("dataset row " + std::to_string(row) + ": '" + s + "' is not a number");
  return v;
}

}  // namespace

std::vector<Sample> read_dataset_csv(std::istream& in, const Box& box, double label_lo, double label_hi) {
  std::string line;
  if (!std::getline(in, line)) throw ContractError("dataset CSV is empty; a header row is required");
  const auto header = split_csv(line);
  if (header.size() != box.dim + 1) throw ContractError("dataset header must have d feature columns and y");
  for (std::size_t i = 0; i < box.dim; ++i)
    if (header[i] != "x" + std::to_string(i))
      throw ContractError("dataset header column " + std::to_string(i) + " must be x" + std::to_string(i));
  if (header.back() != "y") throw ContractError("dataset header must end with y");

  std::vector<Sample> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv(line);
    if (fields.size() != box.dim + 1)
      throw ContractError("dataset row " + std::to_string(row) + " has the wrong number of columns");
    Sample s;
    for (std::size_t i = 0; i < box.dim; ++i) s.x.push_back(parse_double(fields[i], row));
    s.y = parse_double(fields.back(), row);
    if (!box.contains(s.x)) throw ContractError("dataset row " + std::to_string(row) + ": x outside the box");
    if (!(s.y >= label_lo && s.y <= label_hi))
      throw ContractError("dataset row " + std::to_string(row) + ": y outside [u, v]");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Sample> read_dataset_csv(const std::string& path, const Box& box, double label_lo, double label_hi) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open dataset " + path);
  return read_dataset_csv(in, box, label_lo, label_hi);
}

void write_dataset_csv(std::ostream& out, std::span<const Sample> samples) {
  if (samples.empty()) throw ContractError("cannot write an empty dataset");
  const std::size_t d = samples.front().x.size();
  for (std::size_t i = 0; i < d; ++i) out << 'x' << i << ',';
  out << "y\n";
  out << std::setprecision(17);
  for (const auto& s : samples) {
    for (double v : s.x) out << v << ',';
    out << s.y << '\n';
  }
}

}  // namespace erm
