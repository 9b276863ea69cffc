#include "erm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <ostream>
#include <string>

#include "erm/errors.hpp"
#include "erm/parallel.hpp"

namespace erm {

TrainConfig TrainConfig::constant(std::size_t restarts, std::size_t steps, std::vector<std::size_t> checkpoints,
                                  std::size_t batch_size, double learning_rate, double init_half_width, double cap,
                                  std::size_t selection_size, std::uint64_t master_seed) {
  TrainConfig c;
  c.restarts = restarts;
  c.steps = steps;
  c.checkpoints = std::move(checkpoints);
  c.batch_sizes = {batch_size};
  c.learning_rates = {learning_rate};
  c.init_half_width = init_half_width;
  c.cap = cap;
  c.selection_size = selection_size;
  c.master_seed = master_seed;
  return c;
}

void TrainConfig::validate() const {
  if (restarts < 1) throw ContractError("restarts K must be >= 1");
  if (selection_size < 1) throw ContractError("selection_size M must be >= 1");
  if (std::ranges::find(checkpoints, std::size_t{0}) == checkpoints.end())
    throw ContractError("checkpoint set must contain 0");
  if (std::ranges::any_of(checkpoints, [this](std::size_t n) { return n > steps; }))
    throw ContractError("checkpoint beyond the step count N");
  if (!(std::isfinite(init_half_width) && init_half_width >= 1.0))
    throw ContractError("init_half_width c must be >= 1");
  if (!(std::isfinite(cap) && cap >= init_half_width)) throw ContractError("cap B must be >= init_half_width c");
  auto check_len = [this](std::size_t len, const char* what) {
    if (len == 0 || (len != 1 && len < steps))
      throw ContractError(std::string(what) + " needs one entry or at least N entries");
  };
  check_len(batch_sizes.size(), "batch_sizes");
  check_len(learning_rates.size(), "learning_rates");
  if (std::ranges::any_of(batch_sizes, [](std::size_t j) { return j == 0; }))
    throw ContractError("batch sizes must be >= 1");
  if (std::ranges::any_of(learning_rates, [](double g) { return !std::isfinite(g); }))
    throw ContractError("learning rates must be finite");
}

std::size_t TrainConfig::batch_size(std::size_t n) const {
  return batch_sizes.size() == 1 ? batch_sizes[0] : batch_sizes.at(n - 1);
}

double TrainConfig::learning_rate(std::size_t n) const {
  return learning_rates.size() == 1 ? learning_rates[0] : learning_rates.at(n - 1);
}

std::vector<std::size_t> TrainConfig::checkpoint_set() const {
  std::vector<std::size_t> out(checkpoints);
  std::ranges::sort(out);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------

SyntheticSource::SyntheticSource(DataModel model, std::uint64_t master_seed)
    : model_(std::move(model)), seed_(master_seed) {
  model_.validate();
}

Batch SyntheticSource::selection_batch(std::size_t size) const {
  Stream s = derive_stream(seed_, {StreamPurpose::select, 0, 0});
  Batch b{model_.sample_batch(size, s), 0};
  b.draws = s.draws();
  return b;
}

Batch SyntheticSource::gradient_batch(std::size_t k, std::size_t n, std::size_t size) const {
  Stream s = derive_stream(seed_, {StreamPurpose::grad, k, n});
  Batch b{model_.sample_batch(size, s), 0};
  b.draws = s.draws();
  return b;
}

DatasetSource::DatasetSource(std::vector<Sample> rows, std::size_t selection_size, std::uint64_t master_seed)
    : rows_(std::move(rows)), selection_size_(selection_size), seed_(master_seed) {
  if (selection_size_ < 1) throw ContractError("dataset source needs a nonempty selection split");
  if (rows_.size() <= selection_size_)
    throw ContractError("dataset has no rows left for gradient batches after the selection split");
  const std::size_t d = rows_.front().x.size();
  for (const auto& r : rows_)
    if (r.x.size() != d) throw ContractError("dataset rows differ in input dimension");
}

Batch DatasetSource::selection_batch(std::size_t size) const {
  if (size != selection_size_)
    throw ContractError("dataset selection split has " + std::to_string(selection_size_) + " rows, asked for " +
                        std::to_string(size));
  return {std::vector<Sample>(rows_.begin(), rows_.begin() + static_cast<std::ptrdiff_t>(size)), 0};
}

Batch DatasetSource::gradient_batch(std::size_t k, std::size_t n, std::size_t size) const {
  const std::size_t pool = rows_.size() - selection_size_;
  Stream s = derive_stream(seed_, {StreamPurpose::grad, k, n});
  const std::size_t start = s.below(pool);
  Batch b;
  b.samples.reserve(size);
  for (std::size_t i = 0; i < size; ++i) b.samples.push_back(rows_[selection_size_ + (start + i) % pool]);
  b.draws = s.draws();
  return b;
}

// ---------------------------------------------------------------------------

ParamVector init_uniform(std::size_t dim, double c, Stream& stream) {
  if (!(c > 0.0) || !std::isfinite(c)) throw ContractError("init half-width c must be > 0");
  ParamVector theta(dim);
  for (std::size_t i = 0; i < dim; ++i) theta[i] = std::clamp(stream.uniform(-c, c), -c, c);
  return theta;
}

ParamVector sgd_step(const ClippedNet& net, const ParamVector& theta, std::span<const Sample> batch, double gamma) {
  if (!std::isfinite(gamma)) throw ContractError("learning rate must be finite");
  const std::vector<double> g = generalized_gradient(net, theta, batch);
  ParamVector out(theta);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= gamma * g[i];
  return out;
}

std::size_t select_checkpoint(std::span<const CheckpointRecord> records) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.feasible || !r.risk) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = records[*best];
    const bool earlier = std::pair(r.k, r.n) < std::pair(b.k, b.n);
    if (*r.risk < *b.risk || (*r.risk == *b.risk && earlier)) best = i;
  }
  if (!best) throw NoFeasibleCheckpoint("no checkpoint satisfies the parameter cap");
  return *best;
}

namespace {

struct RestartOutput {
  std::vector<CheckpointRecord> records;
  std::vector<double> batch_risks;
  std::uint64_t draws = 0;
};

bool all_finite(std::span<const double> v) {
  return std::ranges::all_of(v, [](double t) { return std::isfinite(t); });
}

RestartOutput run_one(const ClippedNet& net, const TrainConfig& config, const DataSource& source,
                      std::span<const Sample> selection, const std::vector<std::size_t>& checkpoints,
                      std::size_t dim, std::size_t k) {
  RestartOutput out;
  NetEvaluator eval(net);
  Stream init = derive_stream(config.master_seed, {StreamPurpose::init, k, 0});
  ParamVector theta = init_uniform(dim, config.init_half_width, init);
  out.draws += init.draws();

  std::vector<double> grad(dim);
  auto record = [&](std::size_t n) {
    CheckpointRecord r;
    r.k = k;
    r.n = n;
    r.sup_norm = theta.sup_norm();
    r.feasible = r.sup_norm <= config.cap;
    if (r.feasible) r.risk = detail::empirical_risk(eval, theta.values(), selection);
    r.params = theta;
    out.records.push_back(std::move(r));
  };

  auto next_cp = checkpoints.begin();
  if (*next_cp == 0) record(*next_cp++);
  out.batch_risks.reserve(config.steps);
  for (std::size_t n = 1; n <= config.steps; ++n) {
    const Batch batch = source.gradient_batch(k, n, config.batch_size(n));
    out.draws += batch.draws;
    std::ranges::fill(grad, 0.0);
    double sq = 0.0;
    const double inv_j = 1.0 / static_cast<double>(batch.samples.size());
    if (all_finite(theta.values())) {
      for (const auto& s : batch.samples) {
        const double r = eval(theta.values(), s.x) - s.y;
        sq += r * r;
        if (r != 0.0) eval.accumulate_gradient(theta.values(), s.x, 2.0 * r * inv_j, grad);
      }
    } else {
      sq = std::numeric_limits<double>::quiet_NaN();
    }
    out.batch_risks.push_back(sq * inv_j);
    const double gamma = config.learning_rate(n);
    for (std::size_t i = 0; i < dim; ++i) theta[i] -= gamma * grad[i];
    if (next_cp != checkpoints.end() && *next_cp == n) record(*next_cp++);
  }
  return out;
}

}  // namespace

TrainResult run_restarts(const ClippedNet& net, const TrainConfig& config, const DataSource& source,
                         unsigned threads) {
  config.validate();
  const auto& arch = net.arch();
  if (arch.output_dim() != 1) throw ContractError("training needs a scalar-output architecture");
  if (source.input_dim() != arch.input_dim()) throw ContractError("data source dimension differs from l_0");
  const std::size_t dim = config.param_dim == 0 ? arch.param_count() : config.param_dim;
  if (dim < arch.param_count()) throw ContractError("param_dim is below the architecture's param_count");

  const Batch selection = source.selection_batch(config.selection_size);
  ParamVector probe(dim);
  detail::check_batch(net, probe, selection.samples);
  const std::vector<std::size_t> checkpoints = config.checkpoint_set();

  std::vector<RestartOutput> outputs(config.restarts);
  parallel_for(config.restarts, threads, [&](std::size_t i) {
    outputs[i] = run_one(net, config, source, selection.samples, checkpoints, dim, i + 1);
  });

  TrainResult result;
  result.selection_draws = selection.draws;
  for (auto& o : outputs) {
    result.checkpoints.insert(result.checkpoints.end(), std::make_move_iterator(o.records.begin()),
                              std::make_move_iterator(o.records.end()));
    result.batch_risks.push_back(std::move(o.batch_risks));
    result.restart_draws.push_back(o.draws);
  }
  const auto& chosen = result.checkpoints[select_checkpoint(result.checkpoints)];
  result.chosen_k = chosen.k;
  result.chosen_n = chosen.n;
  result.chosen_params = chosen.params;
  result.chosen_risk = *chosen.risk;
  return result;
}

namespace {

// Bitwise equality, so NaN traces from diverged restarts still compare equal.
bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_bits(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](double x, double y) {
           return same_bits(x, y);
         });
}

bool identical(const TrainResult& a, const TrainResult& b) {
  if (a.chosen_k != b.chosen_k || a.chosen_n != b.chosen_n || !same_bits(a.chosen_risk, b.chosen_risk) ||
      !same_bits(a.chosen_params.values(), b.chosen_params.values()) || a.restart_draws != b.restart_draws ||
      a.selection_draws != b.selection_draws || a.checkpoints.size() != b.checkpoints.size() ||
      a.batch_risks.size() != b.batch_risks.size())
    return false;
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
    const auto& x = a.checkpoints[i];
    const auto& y = b.checkpoints[i];
    if (x.k != y.k || x.n != y.n || x.feasible != y.feasible || !same_bits(x.sup_norm, y.sup_norm) ||
        x.risk.has_value() != y.risk.has_value() || (x.risk && !same_bits(*x.risk, *y.risk)) ||
        !same_bits(x.params.values(), y.params.values()))
      return false;
  }
  for (std::size_t i = 0; i < a.batch_risks.size(); ++i)
    if (!same_bits(a.batch_risks[i], b.batch_risks[i])) return false;
  return true;
}

}  // namespace

TrainResult replay(const TrainResult& result, const ClippedNet& net, const TrainConfig& config,
                   const DataSource& source, unsigned threads) {
  TrainResult again = run_restarts(net, config, source, threads);
  if (!identical(result, again))
    throw ReproducibilityError("replayed training run differs from the recorded result");
  return again;
}

void write_trace_csv(std::ostream& out, const TrainResult& result) {
  out << "k,n,risk,feasible\n";
  char buf[64];
  for (const auto& r : result.checkpoints) {
    out << r.k << ',' << r.n << ',';
    if (r.risk) {
      std::snprintf(buf, sizeof buf, "%.17g", *r.risk);
      out << buf;
    }
    out << ',' << (r.feasible ? "true" : "false") << '\n';
  }
}

}  // namespace erm
