#include "erm/mmc_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "erm/errors.hpp"
#include "erm/parallel.hpp"

namespace erm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void draw_in_box(Stream& s, double lo, double hi, std::span<double> out) {
  for (auto& t : out) t = s.uniform(lo, hi);
}

}  // namespace

double RandomField::max_lipschitz_ratio(std::size_t pairs, Stream& stream) const {
  std::vector<double> x(dim), y(dim);
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const Realization r = realize(stream);
    draw_in_box(stream, alpha, beta, x);
    draw_in_box(stream, alpha, beta, y);
    double dist = 0.0;
    for (std::size_t j = 0; j < dim; ++j) dist = std::max(dist, std::abs(x[j] - y[j]));
    if (dist > 0.0) worst = std::max(worst, std::abs(r(x) - r(y)) / dist);
  }
  return worst;
}

RandomField distance_field(std::vector<double> centre, double alpha, double beta) {
  if (centre.empty()) throw ContractError("distance field needs a centre");
  if (!(beta > alpha)) throw ContractError("field box needs beta > alpha");
  RandomField f;
  f.dim = centre.size();
  f.alpha = alpha;
  f.beta = beta;
  f.lipschitz = 1.0;
  auto c = std::make_shared<const std::vector<double>>(std::move(centre));
  f.realize = [c](Stream&) -> RandomField::Realization {
    return [c](std::span<const double> t) {
      double m = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) m = std::max(m, std::abs(t[i] - (*c)[i]));
      return m;
    };
  };
  return f;
}

RandomField constant_field(std::size_t dim, double value, double alpha, double beta) {
  if (dim == 0) throw ContractError("field dimension must be >= 1");
  if (!(beta > alpha)) throw ContractError("field box needs beta > alpha");
  RandomField f;
  f.dim = dim;
  f.alpha = alpha;
  f.beta = beta;
  f.lipschitz = 0.0;
  f.realize = [value](Stream&) -> RandomField::Realization {
    return [value](std::span<const double>) { return value; };
  };
  return f;
}

RandomField empirical_risk_field(const ClippedNet& net, const DataModel& model, std::size_t M, double B) {
  model.validate();
  if (M == 0) throw ContractError("risk field needs M >= 1");
  RandomField f;
  f.dim = net.arch().param_count();
  f.alpha = -B;
  f.beta = B;
  f.lipschitz = lipschitz_risk_bound(net.arch(), net.lower(), net.upper(), input_radius(model.box), B);
  f.realize = [net, model, M](Stream& s) -> RandomField::Realization {
    auto batch = std::make_shared<std::vector<Sample>>(model.sample_batch(M, s));
    auto owner = std::make_shared<ClippedNet>(net);
    auto eval = std::make_shared<NetEvaluator>(*owner);
    return [batch, owner, eval](std::span<const double> theta) {
      return detail::empirical_risk(*eval, theta, *batch);
    };
  };
  return f;
}

Estimate mmc_min(const RandomField& field, std::span<const double> theta_ref, std::size_t K, double p,
                 std::size_t trials, std::uint64_t seed, unsigned threads) {
  if (K == 0) throw ContractError("K must be >= 1");
  if (!(p > 0.0)) throw ContractError("moment order p must be > 0");
  if (trials < 2) throw ContractError("need at least 2 trials");
  if (theta_ref.size() != field.dim) throw ContractError("reference point dimension differs from the field");
  std::vector<double> powered(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    Stream s = derive_stream(seed, {StreamPurpose::mmc, t, K});
    const RandomField::Realization r = field.realize(s);
    const double ref = r(theta_ref);
    std::vector<double> pt(field.dim);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      draw_in_box(s, field.alpha, field.beta, pt);
      best = std::min(best, std::abs(r(pt) - ref));
    }
    powered[t] = std::pow(best, p);
  });
  return pth_root_estimate(powered, p);
}

RateFit fit_rate(std::vector<RateRow> rows) {
  if (rows.size() < 2) throw ContractError("rate fit needs at least two points");
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].x > rows[i - 1].x)) throw ContractError("rate fit needs increasing x values");
  if (rows.back().x < 100.0 * rows.front().x) throw ContractError("rate fit needs at least two decades of spread");
  RateFit fit;
  std::vector<double> lx, ly, w;
  for (auto& r : rows) {
    r.within_bound = r.estimate.value <= r.bound + 3.0 * r.estimate.se;
    fit.all_within_bound = fit.all_within_bound && r.within_bound;
    if (!(r.estimate.value > 0.0)) throw ContractError("rate fit needs positive estimates");
    const double rel = r.estimate.se / r.estimate.value;
    lx.push_back(std::log(r.x));
    ly.push_back(std::log(r.estimate.value));
    w.push_back(1.0 / std::max(rel * rel, 1e-12));
  }
  const LineFit lf = weighted_line_fit(lx, ly, w);
  fit.slope = lf.slope;
  fit.slope_half_width = 3.0 * lf.slope_se;
  fit.rows = std::move(rows);
  return fit;
}

RateFit mmc_rate_experiment(const RandomField& field, std::span<const double> theta_ref, double p,
                            std::span<const std::size_t> K_list, std::size_t trials, std::uint64_t seed,
                            unsigned threads) {
  std::vector<RateRow> rows;
  for (std::size_t K : K_list) {
    RateRow r;
    r.x = static_cast<double>(K);
    r.estimate = mmc_min(field, theta_ref, K, p, trials, seed, threads);
    r.bound = mmc_bound(p, field.lipschitz, field.alpha, field.beta, field.dim, r.x).fine;
    rows.push_back(r);
  }
  return fit_rate(std::move(rows));
}

std::string to_string(MeanDistribution d) {
  switch (d) {
    case MeanDistribution::bernoulli_half: return "bernoulli";
    case MeanDistribution::uniform01: return "uniform";
    case MeanDistribution::point_mass: return "point_mass";
  }
  return "unknown";
}

MeanDistribution mean_distribution_from_string(const std::string& name) {
  if (name == "bernoulli") return MeanDistribution::bernoulli_half;
  if (name == "uniform") return MeanDistribution::uniform01;
  if (name == "point_mass") return MeanDistribution::point_mass;
  throw ContractError("unknown distribution '" + name + "' (bernoulli, uniform, point_mass)");
}

namespace {

struct MeanDist {
  double mean;
  double variance;
  double centered_norm;  // (E|X - mean|^p)^{1/p}
};

MeanDist describe(MeanDistribution d, double p) {
  switch (d) {
    case MeanDistribution::bernoulli_half: return {0.5, 0.25, 0.5};
    case MeanDistribution::uniform01: return {0.5, 1.0 / 12.0, std::pow(std::pow(0.5, p) / (p + 1.0), 1.0 / p)};
    case MeanDistribution::point_mass: return {0.5, 0.0, 0.0};
  }
  return {0.0, 0.0, 0.0};
}

double draw_value(MeanDistribution d, Stream& s) {
  switch (d) {
    case MeanDistribution::bernoulli_half: return static_cast<double>(s() >> 63);
    case MeanDistribution::uniform01: return s.uniform();
    case MeanDistribution::point_mass: return 0.5;
  }
  return 0.0;
}

}  // namespace

McLpReport mc_lp_experiment(MeanDistribution distribution, std::span<const std::size_t> M_list, double p,
                            std::size_t trials, std::uint64_t seed, unsigned threads) {
  if (!(p >= 2.0)) throw ContractError("mc_lp_experiment needs p >= 2");
  if (trials < 2) throw ContractError("need at least 2 trials");
  const MeanDist info = describe(distribution, p);
  McLpReport rep;
  rep.distribution = distribution;
  rep.p = p;
  std::vector<RateRow> fit_rows;
  for (std::size_t M : M_list) {
    if (M == 0) throw ContractError("sample size M must be >= 1");
    std::vector<double> powered(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
      Stream s = derive_stream(seed, {StreamPurpose::mc_lp, t, M});
      double sum = 0.0;
      for (std::size_t j = 0; j < M; ++j) sum += draw_value(distribution, s);
      powered[t] = std::pow(std::abs(sum / static_cast<double>(M) - info.mean), p);
    });
    McLpRow row;
    row.row.x = static_cast<double>(M);
    row.row.estimate = pth_root_estimate(powered, p);
    row.row.bound = mc_lp_bound(p, row.row.x, info.centered_norm);
    row.row.within_bound = row.row.estimate.value <= row.row.bound + 3.0 * row.row.estimate.se;
    row.exact = p == 2.0 ? std::sqrt(info.variance / row.row.x) : kNaN;
    rep.all_within_bound = rep.all_within_bound && row.row.within_bound;
    rep.rows.push_back(row);
    fit_rows.push_back(row.row);
  }
  rep.slope = kNaN;
  rep.slope_half_width = kNaN;
  const bool fittable = fit_rows.size() >= 2 && std::ranges::all_of(fit_rows, [](const RateRow& r) {
                          return r.estimate.value > 0.0;
                        }) && fit_rows.back().x >= 100.0 * fit_rows.front().x;
  if (fittable) {
    const RateFit f = fit_rate(fit_rows);
    rep.slope = f.slope;
    rep.slope_half_width = f.slope_half_width;
  }
  return rep;
}

// ---------------------------------------------------------------------------

double input_radius(const Box& box) { return std::max({1.0, std::abs(box.lo), std::abs(box.hi)}); }

RiskGrid::RiskGrid(const ClippedNet& net, const DataModel& model, double B, std::size_t resolution,
                   std::uint64_t seed, std::size_t mc_samples, unsigned threads)
    : net_(net), dim_(net.arch().param_count()), cap_(B), resolution_(resolution) {
  model.validate();
  if (!(B > 0.0) || !std::isfinite(B)) throw ContractError("grid cap B must be > 0");
  if (resolution % 2 == 0) throw ContractError("grid resolution must be odd so the centre is a node");
  if (dim_ > 4) throw CapabilityError("parameter grid supports at most 4 parameters, net has " + std::to_string(dim_));
  if (net.arch().input_dim() != model.box.dim) throw ContractError("net and data model dimensions differ");
  const double total = std::pow(static_cast<double>(resolution), static_cast<double>(dim_));
  if (total > 2e6) throw CapabilityError("parameter grid larger than 2e6 nodes");
  const std::size_t n = static_cast<std::size_t>(total);
  risks_.assign(n, 0.0);
  ses_.assign(n, 0.0);
  exact_ = exact_risk_supported(net, model.box);
  if (!exact_ && mc_samples < 2) throw ContractError("Monte Carlo risk needs mc_samples >= 2");
  parallel_for(n, threads, [&](std::size_t i) {
    const ParamVector theta = point(i);
    if (exact_) {
      risks_[i] = exact_true_risk(net_, theta, model);
    } else {
      Stream s = derive_stream(seed, {StreamPurpose::eval, i, 1});
      const Estimate e = true_risk_mc(net_, theta, model, mc_samples, s);
      risks_[i] = e.value;
      ses_[i] = e.se;
    }
  });
}

double RiskGrid::spacing() const {
  return resolution_ == 1 ? 2.0 * cap_ : 2.0 * cap_ / static_cast<double>(resolution_ - 1);
}

ParamVector RiskGrid::point(std::size_t i) const {
  ParamVector theta(dim_);
  for (std::size_t j = dim_; j-- > 0;) {
    const std::size_t digit = i % resolution_;
    i /= resolution_;
    theta[j] = resolution_ == 1 ? 0.0 : -cap_ + spacing() * static_cast<double>(digit);
  }
  return theta;
}

SupResult worst_case_generalization(const RiskGrid& grid, std::span<const Sample> batch, unsigned threads) {
  detail::check_batch(grid.net(), grid.point(0), batch);
  std::vector<double> gaps(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    NetEvaluator eval(grid.net());
    const ParamVector theta = grid.point(i);
    gaps[i] = std::abs(detail::empirical_risk(eval, theta.values(), batch) - grid.true_risk(i));
  });
  SupResult r;
  std::size_t best = 0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] > gaps[best]) best = i;
    r.se = std::max(r.se, grid.true_risk_se(i));
  }
  r.sup = gaps[best];
  r.argmax = grid.point(best);
  return r;
}

SupResult worst_case_generalization(const ClippedNet& net, const DataModel& model, std::size_t M, double B,
                                    std::size_t resolution, Stream& stream, unsigned threads) {
  if (M == 0) throw ContractError("M must be >= 1");
  const RiskGrid grid(net, model, B, resolution, 0, 100000, threads);
  const std::vector<Sample> batch = model.sample_batch(M, stream);
  return worst_case_generalization(grid, batch, threads);
}

GeneralizationScaling generalization_scaling(const ClippedNet& net, const DataModel& model, double B,
                                             std::size_t resolution, std::span<const std::size_t> M_list,
                                             std::size_t repetitions, std::uint64_t seed, unsigned threads) {
  if (repetitions < 2) throw ContractError("need at least 2 repetitions");
  const RiskGrid grid(net, model, B, resolution, seed, 100000, threads);
  GeneralizationScaling out;
  out.param_count = grid.dim();
  const double b = input_radius(model.box);
  std::vector<RateRow> rows;
  for (std::size_t M : M_list) {
    std::vector<double> sups(repetitions);
    double grid_se = 0.0;
    for (std::size_t r = 0; r < repetitions; ++r) {
      Stream s = derive_stream(seed, {StreamPurpose::data, M, r});
      const std::vector<Sample> batch = model.sample_batch(M, s);
      const SupResult sr = worst_case_generalization(grid, batch, threads);
      sups[r] = sr.sup;
      grid_se = std::max(grid_se, sr.se);
    }
    RateRow row;
    row.x = static_cast<double>(M);
    row.estimate = mean_and_se(sups);
    row.estimate.se = std::hypot(row.estimate.se, grid_se);
    row.bound = generalization_bound(1.0, net.lower(), net.upper(), net.arch(), row.x, B, b).fine;
    out.bounds_fine.push_back(row.bound);
    rows.push_back(row);
  }
  out.fit = fit_rate(std::move(rows));
  return out;
}

// ---------------------------------------------------------------------------

ParamVector decomposition_reference(const RiskGrid& grid, const DataModel& model) {
  const ClippedNet& net = grid.net();
  const TargetFn& target = model.target;
  if (net.arch().depth() == 1 && target.kind() == TargetFn::Kind::affine_clipped &&
      target.lower() == net.lower() && target.upper() == net.upper()) {
    const AffinePiece& piece = target.pieces().front();
    ParamVector theta(grid.dim());
    for (std::size_t i = 0; i < piece.weights.size(); ++i) theta[i] = piece.weights[i];
    theta[piece.weights.size()] = piece.offset;
    if (theta.sup_norm() <= grid.cap()) return theta;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid.true_risk(i) < grid.true_risk(best)) best = i;
  return grid.point(best);
}

namespace {

// Sup-norm Lipschitz constant of x -> N_theta(x): product of the layers'
// largest absolute row sums.
double input_lipschitz(const ClippedNet& net, const ParamVector& theta) {
  const auto& arch = net.arch();
  double lip = 1.0;
  for (std::size_t i = 1; i <= arch.depth(); ++i) {
    const std::size_t in = arch.width(i - 1);
    const std::size_t out = arch.width(i);
    const std::size_t off = arch.layer_offset(i);
    double row_max = 0.0;
    for (std::size_t r = 0; r < out; ++r) {
      double s = 0.0;
      for (std::size_t q = 0; q < in; ++q) s += std::abs(theta[off + r * in + q]);
      row_max = std::max(row_max, s);
    }
    lip *= row_max;
  }
  return lip;
}

// Grid-sup over x of |N_theta(x) - E(x)|^2: a 101-per-axis grid for d <= 2
// plus 10^4 random probes. Returns the sup and the grid half-spacing.
std::pair<double, double> approx_sup(const ClippedNet& net, const ParamVector& theta, const DataModel& model,
                                     Stream& probes) {
  const Box& box = model.box;
  NetEvaluator eval(net);
  double sup = 0.0;
  std::vector<double> x(box.dim);
  auto visit = [&](std::span<const double> pt) {
    const double r = eval(theta.values(), pt) - model.target(pt);
    sup = std::max(sup, r * r);
  };
  double half = box.hi - box.lo;
  if (box.dim <= 2) {
    constexpr std::size_t G = 101;
    const double h = (box.hi - box.lo) / static_cast<double>(G - 1);
    half = h / 2.0;
    std::size_t total = box.dim == 1 ? G : G * G;
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t rest = i;
      for (std::size_t j = box.dim; j-- > 0;) {
        x[j] = box.lo + h * static_cast<double>(rest % G);
        rest /= G;
      }
      visit(x);
    }
  }
  for (std::size_t i = 0; i < 10000; ++i) {
    box.draw(probes, x);
    visit(x);
  }
  return {sup, half};
}

}  // namespace

DecompositionReport decomposition_check(const ClippedNet& net, const DataModel& model, const TrainConfig& config,
                                        std::size_t resolution, unsigned threads) {
  config.validate();
  model.validate();
  if (model.label_lo < net.lower() || model.label_hi > net.upper())
    throw ContractError("decomposition needs labels inside the clip range [u, v]");
  const SyntheticSource source(model, config.master_seed);
  const TrainResult trained = run_restarts(net, config, source, threads);
  const std::vector<Sample> selection = source.selection_batch(config.selection_size).samples;

  const RiskGrid grid(net, model, config.cap, resolution, config.master_seed, 100000, threads);
  const SupResult sup = worst_case_generalization(grid, selection, threads);

  DecompositionReport rep;
  rep.chosen_k = trained.chosen_k;
  rep.chosen_n = trained.chosen_n;
  rep.reference = decomposition_reference(grid, model);

  NetEvaluator eval(net);
  const double ref_risk = detail::empirical_risk(eval, rep.reference.values(), selection);
  rep.min_term = std::numeric_limits<double>::infinity();
  for (const auto& r : trained.checkpoints)
    if (r.feasible) rep.min_term = std::min(rep.min_term, std::abs(*r.risk - ref_risk));

  if (exact_risk_supported(net, model.box)) {
    rep.lhs = exact_l2_error(net, trained.chosen_params, model.target, model.box);
  } else {
    Stream s = derive_stream(config.master_seed, {StreamPurpose::eval, 0, 0});
    const Estimate e = l2_error_mc(net, trained.chosen_params, model.target, model.box, 100000, s);
    rep.lhs = e.value;
    rep.lhs_se = e.se;
  }

  Stream probes = derive_stream(config.master_seed, {StreamPurpose::probe, 0, 0});
  const auto [approx, x_half] = approx_sup(net, rep.reference, model, probes);
  rep.approx_term = approx;
  rep.gen_term = 2.0 * sup.sup;
  rep.gen_se = 2.0 * sup.se;
  rep.rhs = rep.approx_term + rep.gen_term + rep.min_term;

  const double range = net.upper() - net.lower();
  const double d = static_cast<double>(model.box.dim);
  const double x_slack =
      2.0 * range * (input_lipschitz(net, rep.reference) + d * model.target.lipschitz()) * x_half;
  const double l_risk =
      lipschitz_risk_bound(net.arch(), net.lower(), net.upper(), input_radius(model.box), std::max(1.0, config.cap));
  // Every theta in the box is within spacing/2 of a node and |R_emp - R| is
  // 2 L_risk-Lipschitz, so the sup exceeds the grid-sup by at most L_risk * spacing.
  rep.slack = x_slack + 2.0 * l_risk * grid.spacing();
  const double se = std::hypot(rep.lhs_se, rep.gen_se);
  rep.holds = rep.lhs <= rep.rhs + rep.slack + 3.0 * se;
  return rep;
}

BiasVarianceReport bias_variance_check(const ClippedNet& net, const DataModel& model, double B,
                                       std::size_t pairs, std::size_t n_mc, std::uint64_t seed,
                                       unsigned threads) {
  model.validate();
  if (n_mc < 2) throw ContractError("bias-variance check needs n_mc >= 2");
  if (!(B > 0.0)) throw ContractError("cap B must be > 0");
  if (net.arch().input_dim() != model.box.dim) throw ContractError("net and data model dimensions differ");
  const std::size_t dim = net.arch().param_count();
  std::vector<double> ratios(pairs);
  parallel_for(pairs, threads, [&](std::size_t i) {
    Stream s = derive_stream(seed, {StreamPurpose::probe, i, 1});
    const ParamVector theta = init_uniform(dim, B, s);
    const ParamVector ref = init_uniform(dim, B, s);
    NetEvaluator eval(net);
    std::vector<double> err_diff(n_mc), risk_diff(n_mc);
    for (std::size_t j = 0; j < n_mc; ++j) {
      const Sample smp = model.sample(s);
      const double nt = eval(theta.values(), smp.x);
      const double nr = eval(ref.values(), smp.x);
      const double e = model.target(smp.x);
      err_diff[j] = (nt - e) * (nt - e) - (nr - e) * (nr - e);
      risk_diff[j] = (nt - smp.y) * (nt - smp.y) - (nr - smp.y) * (nr - smp.y);
    }
    const Estimate a = mean_and_se(err_diff);
    const Estimate b = mean_and_se(risk_diff);
    const double gap = std::abs(a.value - b.value);
    const double tol = 3.0 * std::hypot(a.se, b.se);
    ratios[i] = tol > 0.0 ? gap / tol : (gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  });
  BiasVarianceReport rep;
  rep.pairs = pairs;
  for (double r : ratios) {
    if (r > 1.0) ++rep.violations;
    rep.worst_ratio = std::max(rep.worst_ratio, r);
  }
  return rep;
}

// ---------------------------------------------------------------------------

OverallReport overall_error_experiment(const BoundInputs& inputs, const DataModel& model,
                                       const TrainConfig& config, std::span<const std::size_t> restarts,
                                       std::span<const std::uint64_t> seeds, std::size_t n_mc, unsigned threads) {
  if (restarts.empty() || seeds.size() < 2) throw ContractError("overall experiment needs K values and >= 2 seeds");
  model.validate();
  const ClippedNet net(inputs.arch(), inputs.u, inputs.v);
  if (model.box.dim != inputs.d || model.box.lo != inputs.a || model.box.hi != inputs.b)
    throw ContractError("data model box differs from the bound inputs");

  const std::size_t S = seeds.size();
  OverallReport rep;
  rep.restarts.assign(restarts.begin(), restarts.end());
  rep.rows.resize(restarts.size() * S);
  parallel_for(rep.rows.size(), threads, [&](std::size_t job) {
    const std::size_t ki = job / S;
    const std::size_t si = job % S;
    TrainConfig cfg = config;
    cfg.restarts = restarts[ki];
    cfg.master_seed = seeds[si];
    const SyntheticSource source(model, cfg.master_seed);
    const TrainResult result = run_restarts(net, cfg, source, 1);
    Stream s1 = derive_stream(cfg.master_seed, {StreamPurpose::eval, cfg.restarts, 0});
    Stream s2 = derive_stream(cfg.master_seed, {StreamPurpose::eval, cfg.restarts, 0});
    const Estimate l1 = l1_error_mc(net, result.chosen_params, model.target, model.box, n_mc, s1);
    const Estimate l2 = l2_error_mc(net, result.chosen_params, model.target, model.box, n_mc, s2);
    rep.rows[job] = {cfg.restarts, cfg.master_seed, l1.value, l1.se, l2.value, l2.se};
  });

  for (std::size_t ki = 0; ki < restarts.size(); ++ki) {
    std::vector<double> l1(S), l2(S);
    for (std::size_t si = 0; si < S; ++si) {
      l1[si] = rep.rows[ki * S + si].l1_error;
      l2[si] = rep.rows[ki * S + si].l2_error;
    }
    rep.mean_l1.push_back(mean_and_se(l1));
    rep.mean_l2.push_back(mean_and_se(l2));
    rep.median_l1.push_back(median(l1));

    BoundInputs in = inputs;
    in.K = static_cast<double>(restarts[ki]);
    in.M = static_cast<double>(config.selection_size);
    in.p = 1.0;
    rep.intro_bounds.push_back(
        overall_bound_intro(in.d, in.arch(), in.c, in.M, in.K, in.B, in.L));
    rep.main_bounds.push_back(overall_bound_main(in));
    rep.l1_within_bound = rep.l1_within_bound &&
                          rep.mean_l1.back().value <= rep.intro_bounds.back().total + 3.0 * rep.mean_l1.back().se;
    rep.l2_within_bound = rep.l2_within_bound &&
                          rep.mean_l2.back().value <= rep.main_bounds.back().total + 3.0 * rep.mean_l2.back().se;
  }

  const std::size_t last = (restarts.size() - 1) * S;
  for (std::size_t si = 0; si < S; ++si) {
    const double first_err = rep.rows[si].l1_error;
    const double last_err = rep.rows[last + si].l1_error;
    if (last_err < first_err) ++rep.improved;
    else if (last_err == first_err) ++rep.ties;
  }
  rep.sign_test_p = S > rep.ties ? sign_test_p_value(rep.improved, S - rep.ties) : 1.0;
  return rep;
}

}  // namespace erm
