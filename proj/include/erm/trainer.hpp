#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "erm/net.hpp"
#include "erm/risk.hpp"
#include "erm/rng.hpp"

namespace erm {

/// Random-restart SGD configuration.
///
/// Schedules are indexed by step n = 1..N. A schedule of length 1 is constant;
/// otherwise it must have at least N entries and step n uses entry n-1.
struct TrainConfig {
  std::size_t restarts = 1;             // K
  std::size_t steps = 0;                // N
  std::vector<std::size_t> checkpoints{0};
  std::vector<std::size_t> batch_sizes{1};
  std::vector<double> learning_rates{0.0};
  double init_half_width = 1.0;         // c
  double cap = 1.0;                     // B, feasibility is ||theta||_inf <= B
  std::size_t selection_size = 1;       // M
  std::uint64_t master_seed = 0;
  std::size_t param_dim = 0;            // 0 means param_count of the net

  static TrainConfig constant(std::size_t restarts, std::size_t steps, std::vector<std::size_t> checkpoints,
                              std::size_t batch_size, double learning_rate, double init_half_width, double cap,
                              std::size_t selection_size, std::uint64_t master_seed);

  void validate() const;
  std::size_t batch_size(std::size_t n) const;
  double learning_rate(std::size_t n) const;
  // Sorted, duplicate-free checkpoint set.
  std::vector<std::size_t> checkpoint_set() const;

  bool operator==(const TrainConfig&) const = default;
};

struct Batch {
  std::vector<Sample> samples;
  std::uint64_t draws = 0;  // PRNG outputs consumed to build it
};

/// Supplier of the frozen selection batch and the per-(k, n) gradient batches.
/// Implementations must be deterministic and safe to call concurrently.
class DataSource {
 public:
  virtual ~DataSource() = default;
  virtual std::size_t input_dim() const = 0;
  virtual Batch selection_batch(std::size_t size) const = 0;
  virtual Batch gradient_batch(std::size_t k, std::size_t n, std::size_t size) const = 0;
};

/// i.i.d. draws from a data model: the selection batch from stream
/// (select, 0, 0), gradient batch (k, n) from stream (grad, k, n).
class SyntheticSource final : public DataSource {
 public:
  SyntheticSource(DataModel model, std::uint64_t master_seed);

  const DataModel& model() const { return model_; }
  std::size_t input_dim() const override { return model_.box.dim; }
  Batch selection_batch(std::size_t size) const override;
  Batch gradient_batch(std::size_t k, std::size_t n, std::size_t size) const override;

 private:
  DataModel model_;
  std::uint64_t seed_;
};

/// Fixed dataset: the first `selection_size` rows are held out for selection;
/// gradient batch (k, n) is a contiguous cyclic slice of the remaining rows
/// starting at a position drawn from stream (grad, k, n).
class DatasetSource final : public DataSource {
 public:
  DatasetSource(std::vector<Sample> rows, std::size_t selection_size, std::uint64_t master_seed);

  std::size_t input_dim() const override { return rows_.front().x.size(); }
  Batch selection_batch(std::size_t size) const override;
  Batch gradient_batch(std::size_t k, std::size_t n, std::size_t size) const override;

 private:
  std::vector<Sample> rows_;
  std::size_t selection_size_;
  std::uint64_t seed_;
};

struct CheckpointRecord {
  std::size_t k = 0;  // restart, 1-based
  std::size_t n = 0;  // step
  double sup_norm = 0.0;
  bool feasible = false;
  std::optional<double> risk;  // selection risk, recorded for feasible checkpoints only
  ParamVector params;

  bool operator==(const CheckpointRecord&) const = default;
};

struct TrainResult {
  std::size_t chosen_k = 0;
  std::size_t chosen_n = 0;
  ParamVector chosen_params;
  double chosen_risk = 0.0;
  std::vector<CheckpointRecord> checkpoints;       // ordered by (k, n)
  std::vector<std::vector<double>> batch_risks;    // [k-1][n-1]: gradient-batch risk before step n
  std::vector<std::uint64_t> restart_draws;        // init + gradient draws per restart
  std::uint64_t selection_draws = 0;

  bool operator==(const TrainResult&) const = default;
};

// i.i.d. uniform entries on [-c, c]; one draw per entry.
ParamVector init_uniform(std::size_t dim, double c, Stream& stream);

// theta - gamma * generalized_gradient(theta, batch).
ParamVector sgd_step(const ClippedNet& net, const ParamVector& theta, std::span<const Sample> batch, double gamma);

// Index into records of the lexicographically smallest (k, n) among the
// feasible minimizers of the selection risk. Throws NoFeasibleCheckpoint.
std::size_t select_checkpoint(std::span<const CheckpointRecord> records);

// K independent restarts of N steps each, run concurrently over k on up to
// `threads` workers (0 = default). The result does not depend on `threads`.
TrainResult run_restarts(const ClippedNet& net, const TrainConfig& config, const DataSource& source,
                         unsigned threads = 0);

// Reruns the configuration and throws ReproducibilityError unless the new
// result is bit-identical to `result`.
TrainResult replay(const TrainResult& result, const ClippedNet& net, const TrainConfig& config,
                   const DataSource& source, unsigned threads = 0);

// Columns k,n,risk,feasible; risk is empty for infeasible checkpoints.
void write_trace_csv(std::ostream& out, const TrainResult& result);

}  // namespace erm
