#include "erm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "erm/bounds.hpp"
#include "erm/errors.hpp"
#include "erm/mmc_lab.hpp"
#include "erm/parallel.hpp"
#include "erm/special_fn.hpp"
#include "erm/trainer.hpp"

namespace erm::harness {

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::bounds: return "bounds";
    case Kind::train: return "train";
    case Kind::mmc: return "mmc";
    case Kind::decompose: return "decompose";
    case Kind::overall: return "overall";
    case Kind::verify_special: return "verify-special";
    case Kind::covering: return "covering";
  }
  return "unknown";
}

Kind kind_from_string(const std::string& name) {
  for (Kind k : {Kind::bounds, Kind::train, Kind::mmc, Kind::decompose, Kind::overall, Kind::verify_special,
                 Kind::covering})
    if (to_string(k) == name) return k;
  throw SchemaError("kind: unknown experiment kind '" + name + "'");
}

namespace {

// Schema-checked view of a JSON object. Every key read is recorded; finish()
// rejects whatever was not read.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(where() + "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) {
    if (!has(key)) throw SchemaError(name(key) + ": missing required field");
    return j_.at(key);
  }

  double number(const std::string& key) { return as_number(raw(key), name(key)); }
  double number(const std::string& key, double def) { return has(key) ? number(key) : def; }

  std::uint64_t uint(const std::string& key) { return as_uint(raw(key), name(key)); }
  std::uint64_t uint(const std::string& key, std::uint64_t def) { return has(key) ? uint(key) : def; }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw SchemaError(name(key) + ": expected a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw SchemaError(name(key) + ": expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& def) { return has(key) ? string(key) : def; }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw SchemaError(name(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], name(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::vector<std::size_t> sizes(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw SchemaError(name(key) + ": expected an array of nonnegative integers");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(static_cast<std::size_t>(as_uint(v[i], name(key) + "[" + std::to_string(i) + "]")));
    return out;
  }

  Fields sub(const std::string& key) { return Fields(raw(key), name(key)); }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& path() const { return path_; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.contains(key)) throw SchemaError(name(key) + ": unknown field");
  }

 private:
  std::string where() const { return path_.empty() ? "config: " : path_ + ": "; }

  static double as_number(const json& v, const std::string& what) {
    if (!v.is_number()) throw SchemaError(what + ": expected a number");
    return v.get<double>();
  }

  static std::uint64_t as_uint(const json& v, const std::string& what) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw SchemaError(what + ": expected a nonnegative integer");
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json estimate_json(const Estimate& e) { return {{"value", e.value}, {"se", e.se}}; }

json bound_report_json(const BoundReport& r) {
  return {{"formula_id", r.formula_id}, {"approx", r.approx}, {"gen", r.gen},
          {"opt", r.opt},               {"total", r.total},   {"warnings", r.warnings}};
}

std::vector<json> bound_row(const BoundReport& r) { return {r.formula_id, r.approx, r.gen, r.opt, r.total}; }

// ---------------------------------------------------------------------------
// Shared config sections.

BoundInputs parse_bound_inputs(Fields f) {
  BoundInputs in;
  in.d = f.uint("d");
  in.widths = f.sizes("widths");
  in.L = f.number("L");
  in.a = f.number("a");
  in.b = f.number("b");
  in.u = f.number("u");
  in.v = f.number("v");
  in.c = f.number("c");
  in.B = f.number("B", in.c);
  in.M = f.number("M", 1.0);
  in.K = f.number("K", 1.0);
  in.p = f.number("p", 1.0);
  if (f.has("A")) in.A = f.number("A");
  f.finish();
  try {
    (void)in.arch();
  } catch (const ContractError& e) {
    throw SchemaError(f.name("widths") + ": " + e.what());
  }
  return in;
}

ClippedNet parse_net(Fields f) {
  const auto widths = f.sizes("widths");
  const double u = f.number("u");
  const double v = f.number("v");
  f.finish();
  return ClippedNet(Architecture(widths), u, v);
}

DataModel parse_data_model(Fields f, double u, double v) {
  Fields box_f = f.sub("box");
  Box box{static_cast<std::size_t>(box_f.uint("dim")), box_f.number("lo"), box_f.number("hi")};
  box_f.finish();

  Fields t = f.sub("target");
  const std::string kind = t.string("kind");
  const double lo = t.number("lo", u);
  const double hi = t.number("hi", v);
  std::vector<AffinePiece> pieces;
  const json& arr = t.raw("pieces");
  if (!arr.is_array() || arr.empty()) throw SchemaError(t.name("pieces") + ": expected a nonempty array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Fields p(arr[i], t.name("pieces") + "[" + std::to_string(i) + "]");
    pieces.push_back({p.numbers("weights"), p.number("offset")});
    p.finish();
  }
  std::optional<TargetFn> target;
  if (kind == "affine_clipped") {
    if (pieces.size() != 1) throw SchemaError(t.name("pieces") + ": affine_clipped takes exactly one piece");
    target = TargetFn::affine_clipped(pieces[0].weights, pieces[0].offset, lo, hi);
  } else if (kind == "max_affine") {
    target = TargetFn::max_affine(pieces, lo, hi);
  } else {
    throw SchemaError(t.name("kind") + ": expected affine_clipped or max_affine");
  }
  if (t.has("lipschitz")) target->declare_lipschitz(t.number("lipschitz"));
  t.finish();

  DataModel model{box, *target, f.number("noise", 0.0), u, v};
  if (f.has("labels")) {
    const auto labels = f.numbers("labels");
    if (labels.size() != 2) throw SchemaError(f.name("labels") + ": expected [lo, hi]");
    model.label_lo = labels[0];
    model.label_hi = labels[1];
  }
  f.finish();
  try {
    model.validate();
  } catch (const ContractError& e) {
    throw SchemaError(f.name("target") + ": " + e.what());
  }
  return model;
}

TrainConfig parse_train_config(Fields f, std::uint64_t seed) {
  TrainConfig c;
  c.restarts = f.uint("restarts", 1);
  c.steps = f.uint("steps");
  c.checkpoints = f.has("checkpoints") ? f.sizes("checkpoints") : std::vector<std::size_t>{0};
  if (f.has("batch_sizes")) c.batch_sizes = f.sizes("batch_sizes");
  else c.batch_sizes = {static_cast<std::size_t>(f.uint("batch_size", 1))};
  if (f.has("learning_rates")) c.learning_rates = f.numbers("learning_rates");
  else c.learning_rates = {f.number("learning_rate", 0.0)};
  c.init_half_width = f.number("init_half_width");
  c.cap = f.number("cap", c.init_half_width);
  c.selection_size = f.uint("selection_size");
  c.param_dim = f.uint("param_dim", 0);
  c.master_seed = seed;
  f.finish();
  try {
    c.validate();
  } catch (const ContractError& e) {
    throw SchemaError(f.path() + ": " + e.what());
  }
  return c;
}

json checkpoint_json(const CheckpointRecord& r) {
  return {{"k", r.k},
          {"n", r.n},
          {"sup_norm", r.sup_norm},
          {"feasible", r.feasible},
          {"risk", r.risk ? json(*r.risk) : json(nullptr)}};
}

// ---------------------------------------------------------------------------
// Runners.

void run_bounds(Fields& root, Report& rep, bool strict) {
  const BoundInputs in = parse_bound_inputs(root.sub("bounds"));
  const Architecture arch = in.arch();
  const double b = std::max({1.0, std::abs(in.a), std::abs(in.b)});

  std::vector<BoundReport> reports = {overall_bound_main(in), overall_bound_main_coarse(in), sgd_l1_bound(in),
                                      sgd_l1_bound_coarse(in)};
  if (in.a == 0.0 && in.b == 1.0 && in.u == 0.0 && in.v == 1.0)
    reports.push_back(overall_bound_intro(in.d, arch, in.c, in.M, in.K, in.B, in.L));

  rep.columns = {"formula_id", "approx", "gen", "opt", "total"};
  json list = json::array();
  for (const auto& r : reports) {
    rep.rows.push_back(bound_row(r));
    list.push_back(bound_report_json(r));
    if (!(r.approx >= 0.0 && r.gen >= 0.0 && r.opt >= 0.0))
      rep.failures.push_back(r.formula_id + ": negative term");
    if (strict)
      for (const auto& w : r.warnings) rep.failures.push_back(r.formula_id + ": hypothesis violated: " + w);
  }
  rep.result["reports"] = list;

  const FineCoarse gen = generalization_bound(in.p, in.u, in.v, arch, in.M, in.B, b);
  const FineCoarse opt = optimization_bound(in.p, in.u, in.v, arch, b, in.B, in.K);
  rep.result["generalization"] = {{"fine", gen.fine}, {"coarse", gen.coarse}, {"warnings", gen.warnings}};
  rep.result["optimization"] = {{"fine", opt.fine}, {"coarse", opt.coarse}, {"warnings", opt.warnings}};
  rep.result["approx_bound"] = approx_bound(in.d, in.L, in.a, in.b, in.capacity());
  rep.result["capacity"] = in.capacity();
  rep.result["lipschitz_risk"] = lipschitz_risk_bound(arch, in.u, in.v, b, std::max(1.0, in.B));
  const Admissibility adm = arch_admissible_for_A(arch, in.d, in.capacity());
  rep.result["admissible"] = {{"admissible", adm.admissible}, {"message", adm.message}};
  if (in.M >= 1.0 && in.c >= 1.0 && in.B >= in.c) {
    const LnCheck ln = ln_reduction_check(in.M, in.B, in.c);
    rep.result["ln_check"] = {{"lhs", ln.lhs}, {"rhs", ln.rhs}, {"holds", ln.holds}};
    if (!ln.holds) rep.failures.push_back("ln reduction check failed");
  }
  for (const auto& [name, fc] : {std::pair{"generalization", gen}, std::pair{"optimization", opt}})
    if (fc.fine > fc.coarse * (1.0 + 1e-12)) rep.failures.push_back(std::string(name) + ": fine form exceeds coarse");
}

void run_covering(Fields& root, Report& rep) {
  Fields f = root.sub("covering");
  const std::size_t d = f.uint("d");
  const double a = f.number("a");
  const double b = f.number("b");
  const double r = f.number("r");
  double p = kInfNorm;
  if (f.has("p")) {
    const json& pv = f.raw("p");
    if (pv.is_string() && pv.get<std::string>() == "inf") p = kInfNorm;
    else if (pv.is_number()) p = pv.get<double>();
    else throw SchemaError(f.name("p") + ": expected a number >= 1 or \"inf\"");
  }
  const std::size_t probes = f.uint("probes", 10000);
  f.finish();

  const CoveringBound cb = covering_number_bound(d, a, b, r, p);
  const auto grid = covering_grid(d, a, b, cb.per_axis);
  Stream s = derive_stream(rep.seed, {StreamPurpose::probe, 0, 0});
  const Box box{d, a, b};
  std::vector<double> x(d), nearest(d);
  double worst = 0.0;
  const double n = static_cast<double>(cb.per_axis);
  for (std::size_t i = 0; i < probes; ++i) {
    box.draw(s, x);
    for (std::size_t j = 0; j < d; ++j) {
      const double idx = std::clamp(std::floor((x[j] - a) / (b - a) * n), 0.0, n - 1.0);
      nearest[j] = a + (idx + 0.5) * (b - a) / n;
    }
    worst = std::max(worst, lp_distance(x, nearest, p));
  }
  const bool covered = worst <= r * (1.0 + 1e-12);
  if (!covered) rep.failures.push_back("covering grid misses a probe at the stated radius");
  if (grid.size() > cb.count) rep.failures.push_back("covering grid larger than the covering bound");

  rep.result = {{"count", cb.count},
                {"coarse", cb.coarse},
                {"per_axis", cb.per_axis},
                {"grid_size", grid.size()},
                {"max_probe_distance", worst},
                {"covered", covered}};
  rep.columns = {"d", "p", "r", "per_axis", "count", "coarse", "grid_size", "max_probe_distance", "covered"};
  rep.rows.push_back({d, std::isinf(p) ? json("inf") : json(p), r, cb.per_axis, cb.count, cb.coarse, grid.size(),
                      worst, covered});
}

void run_verify_special(Fields& root, Report& rep) {
  std::size_t trials = 10000;
  if (root.has("verify-special")) {
    Fields f = root.sub("verify-special");
    trials = f.uint("trials", trials);
    f.finish();
  }
  rep.columns = {"inequality", "trials", "violations", "worst_slack", "pass"};
  json list = json::array();
  for (const auto& s : run_special_sweeps(trials, rep.seed)) {
    const bool pass = s.violations == 0;
    rep.rows.push_back({s.name, s.trials, s.violations, s.worst_slack, pass});
    list.push_back({{"name", s.name}, {"trials", s.trials}, {"violations", s.violations},
                    {"worst_slack", s.worst_slack}, {"pass", pass}});
    if (!pass) rep.failures.push_back(s.name + ": " + std::to_string(s.violations) + " violations");
  }
  rep.result["sweeps"] = list;
}

void run_train(Fields& root, Report& rep, unsigned threads) {
  const ClippedNet net = parse_net(root.sub("net"));
  const DataModel model = parse_data_model(root.sub("data"), net.lower(), net.upper());
  const TrainConfig cfg = parse_train_config(root.sub("train"), rep.seed);
  const bool verify_replay = root.boolean("verify_replay", false);
  std::unique_ptr<DataSource> source;
  if (root.has("dataset")) {
    const std::string path = root.string("dataset");
    source = std::make_unique<DatasetSource>(read_dataset_csv(path, model.box, model.label_lo, model.label_hi),
                                             cfg.selection_size, cfg.master_seed);
  } else {
    source = std::make_unique<SyntheticSource>(model, cfg.master_seed);
  }
  TrainResult result = run_restarts(net, cfg, *source, threads);
  if (verify_replay) {
    try {
      replay(result, net, cfg, *source, threads == 1 ? 2 : 1);
    } catch (const ReproducibilityError& e) {
      rep.failures.push_back(e.what());
    }
  }
  json cps = json::array();
  for (const auto& r : result.checkpoints) cps.push_back(checkpoint_json(r));
  rep.result = {{"chosen_k", result.chosen_k},
                {"chosen_n", result.chosen_n},
                {"chosen_risk", result.chosen_risk},
                {"chosen_params", result.chosen_params.vector()},
                {"checkpoints", cps},
                {"restart_draws", result.restart_draws},
                {"selection_draws", result.selection_draws},
                {"replay_verified", verify_replay && rep.failures.empty()}};
  rep.columns = {"k", "n", "risk", "feasible"};
  for (const auto& r : result.checkpoints)
    rep.rows.push_back({r.k, r.n, r.risk ? json(*r.risk) : json(nullptr), r.feasible});
}

void run_mmc(Fields& root, Report& rep, unsigned threads) {
  Fields f = root.sub("mmc");
  rep.columns = {"experiment", "x", "estimate", "se", "bound", "within_bound"};
  if (f.has("rate")) {
    Fields r = f.sub("rate");
    const std::size_t dim = r.uint("dim");
    const double alpha = r.number("alpha", 0.0);
    const double beta = r.number("beta", 1.0);
    std::vector<double> centre = r.has("centre") ? r.numbers("centre") : std::vector<double>(dim, 0.5 * (alpha + beta));
    if (centre.size() != dim) throw SchemaError(r.name("centre") + ": length differs from dim");
    const double p = r.number("p", 1.0);
    const auto K_list = r.sizes("K_list");
    const std::size_t trials = r.uint("trials", 10000);
    const bool check_slope = r.has("expected_slope");
    const double expected = check_slope ? r.number("expected_slope") : 0.0;
    const double tol = r.number("slope_tolerance", 0.15);
    r.finish();
    const RandomField field = distance_field(centre, alpha, beta);
    RateFit fit;
    try {
      fit = mmc_rate_experiment(field, centre, p, K_list, trials, rep.seed, threads);
    } catch (const ContractError& e) {
      throw SchemaError(r.name("K_list") + ": " + e.what());
    }
    for (const auto& row : fit.rows) {
      rep.rows.push_back({"mmc_rate", row.x, row.estimate.value, row.estimate.se, row.bound, row.within_bound});
      if (!row.within_bound) rep.failures.push_back("mmc K=" + std::to_string(static_cast<long long>(row.x)) + ": estimate above bound + 3 se");
    }
    rep.result["rate"] = {{"slope", fit.slope}, {"slope_half_width", fit.slope_half_width}, {"dim", dim}};
    if (check_slope && std::abs(fit.slope - expected) > tol)
      rep.failures.push_back("mmc slope " + std::to_string(fit.slope) + " outside expected +- tolerance");
  }
  if (f.has("mc_lp")) {
    const json& arr = f.raw("mc_lp");
    if (!arr.is_array()) throw SchemaError(f.name("mc_lp") + ": expected an array");
    json out = json::array();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Fields m(arr[i], f.name("mc_lp") + "[" + std::to_string(i) + "]");
      MeanDistribution dist;
      try {
        dist = mean_distribution_from_string(m.string("distribution"));
      } catch (const ContractError& e) {
        throw SchemaError(m.name("distribution") + ": " + e.what());
      }
      const double p = m.number("p", 2.0);
      if (!(p >= 2.0)) throw SchemaError(m.name("p") + ": must be >= 2");
      const auto M_list = m.sizes("M_list");
      const std::size_t trials = m.uint("trials", 10000);
      m.finish();
      const McLpReport lp = mc_lp_experiment(dist, M_list, p, trials, rep.seed, threads);
      const std::string name = "mc_lp_" + to_string(dist) + "_p" + std::to_string(static_cast<int>(p));
      for (const auto& row : lp.rows) {
        rep.rows.push_back({name, row.row.x, row.row.estimate.value, row.row.estimate.se, row.row.bound,
                            row.row.within_bound});
        if (!row.row.within_bound)
          rep.failures.push_back(name + " M=" + std::to_string(static_cast<long long>(row.row.x)) + ": above bound");
      }
      out.push_back({{"name", name}, {"slope", lp.slope}, {"slope_half_width", lp.slope_half_width}});
    }
    rep.result["mc_lp"] = out;
  }
  f.finish();
}

void run_decompose(Fields& root, Report& rep, unsigned threads) {
  const ClippedNet net = parse_net(root.sub("net"));
  const DataModel model = parse_data_model(root.sub("data"), net.lower(), net.upper());
  const TrainConfig cfg = parse_train_config(root.sub("train"), rep.seed);
  const std::size_t resolution = root.uint("resolution", 21);
  if (resolution % 2 == 0) throw SchemaError("resolution: must be odd");
  const DecompositionReport d = decomposition_check(net, model, cfg, resolution, threads);
  rep.result = {{"lhs", d.lhs},         {"lhs_se", d.lhs_se},     {"approx_term", d.approx_term},
                {"gen_term", d.gen_term}, {"gen_se", d.gen_se},   {"min_term", d.min_term},
                {"slack", d.slack},     {"rhs", d.rhs},           {"holds", d.holds},
                {"reference", d.reference.vector()}, {"chosen_k", d.chosen_k}, {"chosen_n", d.chosen_n}};
  rep.columns = {"lhs", "approx_term", "gen_term", "min_term", "slack", "rhs", "holds"};
  rep.rows.push_back({d.lhs, d.approx_term, d.gen_term, d.min_term, d.slack, d.rhs, d.holds});
  if (!d.holds) rep.failures.push_back("error decomposition: lhs exceeds rhs + slack + 3 se");

  if (root.has("bias_variance")) {
    Fields bv = root.sub("bias_variance");
    const std::size_t pairs = bv.uint("pairs", 200);
    const std::size_t n_mc = bv.uint("n_mc", 20000);
    const double cap = bv.number("cap", cfg.cap);
    bv.finish();
    const BiasVarianceReport b = bias_variance_check(net, model, cap, pairs, n_mc, rep.seed, threads);
    rep.result["bias_variance"] = {{"pairs", b.pairs}, {"violations", b.violations}, {"worst_ratio", b.worst_ratio}};
    if (b.violations > 0)
      rep.failures.push_back("bias-variance identity: " + std::to_string(b.violations) + " pairs beyond 3 se");
  }
}

void run_overall(Fields& root, Report& rep, bool strict, unsigned threads) {
  const BoundInputs in = parse_bound_inputs(root.sub("bounds"));
  const DataModel model = parse_data_model(root.sub("data"), in.u, in.v);
  const TrainConfig cfg = parse_train_config(root.sub("train"), rep.seed);
  // train.restarts, if given, is replaced by each entry of this list.
  const auto restarts = root.sizes("restarts");
  if (restarts.empty()) throw SchemaError("restarts: expected at least one K");
  const std::size_t seed_count = root.uint("seed_count", 20);
  const std::size_t n_mc = root.uint("n_mc", 10000);
  const bool require_improvement = root.boolean("require_improvement", true);
  std::vector<std::uint64_t> seeds(seed_count);
  for (std::size_t i = 0; i < seed_count; ++i) seeds[i] = rep.seed + i;

  const OverallReport o = overall_error_experiment(in, model, cfg, restarts, seeds, n_mc, threads);
  rep.columns = {"restarts", "seed", "l1_error", "l1_se", "l2_error", "l2_se"};
  for (const auto& r : o.rows) rep.rows.push_back({r.restarts, r.seed, r.l1_error, r.l1_se, r.l2_error, r.l2_se});
  json per_k = json::array();
  for (std::size_t i = 0; i < o.restarts.size(); ++i) {
    per_k.push_back({{"restarts", o.restarts[i]},
                     {"mean_l1", estimate_json(o.mean_l1[i])},
                     {"median_l1", o.median_l1[i]},
                     {"mean_l2", estimate_json(o.mean_l2[i])},
                     {"intro_bound", bound_report_json(o.intro_bounds[i])},
                     {"main_bound", bound_report_json(o.main_bounds[i])}});
    if (strict) {
      for (const auto& w : o.intro_bounds[i].warnings) rep.failures.push_back("intro: hypothesis violated: " + w);
      for (const auto& w : o.main_bounds[i].warnings) rep.failures.push_back("main: hypothesis violated: " + w);
    }
  }
  rep.result = {{"per_restarts", per_k},
                {"improved", o.improved},
                {"ties", o.ties},
                {"sign_test_p", o.sign_test_p},
                {"l1_within_bound", o.l1_within_bound},
                {"l2_within_bound", o.l2_within_bound}};
  if (!o.l1_within_bound) rep.failures.push_back("measured L1 error above the intro bound");
  if (!o.l2_within_bound) rep.failures.push_back("measured squared L2 error above the main bound");
  if (require_improvement && o.restarts.size() >= 2) {
    if (o.median_l1.back() > o.median_l1.front()) rep.failures.push_back("median L1 error grew with more restarts");
    if (o.sign_test_p > 0.05) rep.failures.push_back("sign test for improvement not significant at 5%");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::string config_hash(const json& config) {
  const std::string s = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Report run(Kind kind, const json& config, const RunOptions& options) {
  json effective = config.is_null() ? json::object() : config;
  Fields root(effective, "");
  const std::uint64_t version = root.uint("schema_version");
  if (version != kSchemaVersion)
    throw SchemaError("schema_version: expected " + std::to_string(kSchemaVersion) + ", got " + std::to_string(version));
  if (root.has("kind") && root.string("kind") != to_string(kind))
    throw SchemaError("kind: config is for '" + root.string("kind") + "', not '" + to_string(kind) + "'");

  Report rep;
  rep.kind = to_string(kind);
  rep.seed = options.seed ? *options.seed : root.uint("seed", 0);
  const bool strict = options.strict || root.boolean("strict", false);
  if (root.has("out")) root.string("out");  // read by the CLI, type-checked here
  effective["seed"] = rep.seed;
  effective["kind"] = rep.kind;
  if (strict) effective["strict"] = true;
  rep.result = json::object();

  Fields body(effective, "");
  for (const char* key : {"schema_version", "seed", "kind", "strict", "out"}) body.has(key);
  const unsigned threads = options.threads;
  switch (kind) {
    case Kind::bounds: run_bounds(body, rep, strict); break;
    case Kind::covering: run_covering(body, rep); break;
    case Kind::verify_special: run_verify_special(body, rep); break;
    case Kind::train: run_train(body, rep, threads); break;
    case Kind::mmc: run_mmc(body, rep, threads); break;
    case Kind::decompose: run_decompose(body, rep, threads); break;
    case Kind::overall: run_overall(body, rep, strict, threads); break;
  }
  body.finish();
  rep.config = effective;
  rep.config_hash = config_hash(effective);
  return rep;
}

json Report::to_json() const {
  json rows_json = json::array();
  for (const auto& r : rows) rows_json.push_back(r);
  return {{"kind", kind},     {"config_hash", config_hash}, {"seed", seed},
          {"config", config}, {"result", result},           {"table", {{"columns", columns}, {"rows", rows_json}}},
          {"failures", failures}};
}

Report Report::from_json(const json& j) {
  try {
    Report r;
    r.kind = j.at("kind").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config = j.at("config");
    r.result = j.at("result");
    r.columns = j.at("table").at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("table").at("rows")) r.rows.push_back(row.get<std::vector<json>>());
    r.failures = j.at("failures").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("report: ") + e.what());
  }
}

std::string format_csv_value(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

namespace {

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out + "\n";
}

}  // namespace

std::string Report::to_csv() const {
  std::string out = csv_line(columns);
  for (const auto& row : rows) {
    std::vector<std::string> cells;
    for (const auto& v : row) cells.push_back(format_csv_value(v));
    out += csv_line(cells);
  }
  return out;
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("config: cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("config: " + path.string() + " is not valid JSON: " + e.what());
  }
}

void write_report(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream js(dir / (report.kind + ".json"));
  js << report.to_json().dump(2) << '\n';
  std::ofstream csv(dir / (report.kind + ".csv"));
  csv << report.to_csv();
  if (!js || !csv) throw std::runtime_error("cannot write report to " + dir.string());
}

std::string merge_reports(const std::vector<Report>& reports) {
  std::vector<std::string> header = {"config_hash", "seed"};
  if (reports.empty()) return csv_line(header);
  const Report& first = reports.front();
  for (const auto& r : reports) {
    if (r.kind != first.kind) throw SchemaError("merge: mixed report kinds '" + first.kind + "' and '" + r.kind + "'");
    if (r.columns != first.columns) throw SchemaError("merge: reports of kind '" + r.kind + "' differ in columns");
  }
  header.insert(header.end(), first.columns.begin(), first.columns.end());
  std::string out = csv_line(header);
  for (const auto& r : reports) {
    for (const auto& row : r.rows) {
      std::vector<std::string> cells = {r.config_hash, std::to_string(r.seed)};
      for (const auto& v : row) cells.push_back(format_csv_value(v));
      out += csv_line(cells);
    }
  }
  return out;
}

std::string merge_report_files(const std::vector<std::filesystem::path>& paths) {
  std::vector<Report> reports;
  for (const auto& p : paths) reports.push_back(Report::from_json(load_json(p)));
  return merge_reports(reports);
}

}  // namespace erm::harness
