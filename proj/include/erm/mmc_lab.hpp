#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "erm/bounds.hpp"
#include "erm/net.hpp"
#include "erm/risk.hpp"
#include "erm/rng.hpp"
#include "erm/stats.hpp"
#include "erm/trainer.hpp"

namespace erm {

/// Random field R(theta, omega) on [alpha, beta]^dim, Lipschitz in theta with
/// constant `lipschitz` (sup-norm) for every realization.
struct RandomField {
  using Realization = std::function<double(std::span<const double>)>;

  std::size_t dim = 1;
  double alpha = 0.0;
  double beta = 1.0;
  double lipschitz = 1.0;
  // Draws one realization omega; must be safe to call concurrently.
  std::function<Realization(Stream&)> realize;

  // Largest |R(x) - R(y)| / ||x - y||_inf over `pairs` random pairs, one
  // realization per pair.
  double max_lipschitz_ratio(std::size_t pairs, Stream& stream) const;
};

// R(theta) = ||theta - centre||_inf on [alpha, beta]^dim (deterministic).
RandomField distance_field(std::vector<double> centre, double alpha = 0.0, double beta = 1.0);
RandomField constant_field(std::size_t dim, double value, double alpha = 0.0, double beta = 1.0);
// Empirical risk of M fresh samples, theta in [-B, B]^dim.
RandomField empirical_risk_field(const ClippedNet& net, const DataModel& model, std::size_t M, double B);

/// (E[min_k |R(Theta_k) - R(theta_ref)|^p])^{1/p} over `trials` independent
/// realizations. Trial t uses stream (mmc, t, K) for the field and the points.
Estimate mmc_min(const RandomField& field, std::span<const double> theta_ref, std::size_t K, double p,
                 std::size_t trials, std::uint64_t seed, unsigned threads = 0);

struct RateRow {
  double x = 0.0;  // K or M
  Estimate estimate;
  double bound = 0.0;
  bool within_bound = true;  // estimate <= bound + 3 se
};

struct RateFit {
  std::vector<RateRow> rows;
  double slope = 0.0;
  double slope_half_width = 0.0;  // 3 standard errors
  bool all_within_bound = true;
};

// Requires increasing x values spanning at least two decades.
RateFit fit_rate(std::vector<RateRow> rows);

RateFit mmc_rate_experiment(const RandomField& field, std::span<const double> theta_ref, double p,
                            std::span<const std::size_t> K_list, std::size_t trials, std::uint64_t seed,
                            unsigned threads = 0);

enum class MeanDistribution { bernoulli_half, uniform01, point_mass };

std::string to_string(MeanDistribution d);
MeanDistribution mean_distribution_from_string(const std::string& name);

struct McLpRow {
  RateRow row;
  double exact = 0.0;  // exact L^p error when available (p = 2), else NaN
};

struct McLpReport {
  MeanDistribution distribution;
  double p = 2.0;
  std::vector<McLpRow> rows;
  double slope = 0.0;  // NaN for the point mass
  double slope_half_width = 0.0;
  bool all_within_bound = true;
};

// Empirical (E|mean_M - mu|^p)^{1/p} for each M against mc_lp_bound.
McLpReport mc_lp_experiment(MeanDistribution distribution, std::span<const std::size_t> M_list, double p,
                            std::size_t trials, std::uint64_t seed, unsigned threads = 0);

/// Odd-resolution, endpoint-inclusive grid on [-B, B]^dim with the true risk
/// at every node. The risk is exact for single-layer nets with d <= 2 and a
/// Monte Carlo estimate otherwise.
class RiskGrid {
 public:
  RiskGrid(const ClippedNet& net, const DataModel& model, double B, std::size_t resolution,
           std::uint64_t seed = 0, std::size_t mc_samples = 100000, unsigned threads = 0);

  const ClippedNet& net() const { return net_; }
  std::size_t size() const { return risks_.size(); }
  std::size_t dim() const { return dim_; }
  double cap() const { return cap_; }
  std::size_t resolution() const { return resolution_; }
  double spacing() const;
  ParamVector point(std::size_t i) const;
  double true_risk(std::size_t i) const { return risks_[i]; }
  double true_risk_se(std::size_t i) const { return ses_[i]; }
  bool exact() const { return exact_; }

 private:
  ClippedNet net_;
  std::size_t dim_;
  double cap_;
  std::size_t resolution_;
  std::vector<double> risks_;
  std::vector<double> ses_;
  bool exact_ = true;
};

struct SupResult {
  double sup = 0.0;
  double se = 0.0;  // largest true-risk SE on the grid (0 when exact)
  ParamVector argmax;
};

// Grid-sup of |R_emp(theta) - R(theta)| with R_emp over `batch`; a lower bound
// on the sup over the box.
SupResult worst_case_generalization(const RiskGrid& grid, std::span<const Sample> batch, unsigned threads = 0);
// Draws M samples from the model (stream supplied) and builds the grid.
SupResult worst_case_generalization(const ClippedNet& net, const DataModel& model, std::size_t M, double B,
                                    std::size_t resolution, Stream& stream, unsigned threads = 0);

struct GeneralizationScaling {
  RateFit fit;  // x = M, estimate = mean grid-sup over repetitions
  std::vector<double> bounds_fine;
  std::size_t param_count = 0;
};

// Repetition r at sample size M draws its batch from stream (data, M, r).
GeneralizationScaling generalization_scaling(const ClippedNet& net, const DataModel& model, double B,
                                             std::size_t resolution, std::span<const std::size_t> M_list,
                                             std::size_t repetitions, std::uint64_t seed, unsigned threads = 0);

// Smallest b >= 1 with [a, b]^d inside [-b, b]^d.
double input_radius(const Box& box);

struct DecompositionReport {
  double lhs = 0.0;         // integral |N_theta_k - E|^2 dP_X
  double lhs_se = 0.0;
  double approx_term = 0.0; // grid-sup_x |N_ref - E|^2
  double gen_term = 0.0;    // 2 * grid-sup_theta |R_emp - R|
  double gen_se = 0.0;
  double min_term = 0.0;    // min over feasible checkpoints |R_emp(theta) - R_emp(ref)|
  double slack = 0.0;       // grid-modulus slack for both grid sups
  double rhs = 0.0;         // approx + gen + min
  bool holds = false;       // lhs <= rhs + slack + 3 * combined se
  ParamVector reference;
  std::size_t chosen_k = 0;
  std::size_t chosen_n = 0;
};

// Reference parameter for the approximation term: the exact representer when
// the target is an affine clip with the net's range inside the cap, otherwise
// the grid node with the smallest L2 error.
ParamVector decomposition_reference(const RiskGrid& grid, const DataModel& model);

DecompositionReport decomposition_check(const ClippedNet& net, const DataModel& model, const TrainConfig& config,
                                        std::size_t resolution, unsigned threads = 0);

struct BiasVarianceReport {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max |difference| / (3 se); <= 1 means within
};

/// Checks err(theta) - err(ref) = R(theta) - R(ref) on random parameter pairs
/// in [-B, B]^dim. Both sides are estimated from the same (X, Y) draws.
BiasVarianceReport bias_variance_check(const ClippedNet& net, const DataModel& model, double B,
                                       std::size_t pairs, std::size_t n_mc, std::uint64_t seed,
                                       unsigned threads = 0);

struct OverallRow {
  std::size_t restarts = 0;
  std::uint64_t seed = 0;
  double l1_error = 0.0;
  double l1_se = 0.0;
  double l2_error = 0.0;  // squared L2 error
  double l2_se = 0.0;
};

struct OverallReport {
  std::vector<OverallRow> rows;          // ordered by (K, seed)
  std::vector<std::size_t> restarts;
  std::vector<Estimate> mean_l1;         // per K over seeds
  std::vector<Estimate> mean_l2;
  std::vector<double> median_l1;
  std::vector<BoundReport> intro_bounds; // per K
  std::vector<BoundReport> main_bounds;  // per K, p = 1
  bool l1_within_bound = true;
  bool l2_within_bound = true;
  // First vs last K in the list: seeds where the larger K is strictly better,
  // seeds that tie, and the one-sided sign-test p-value on the untied seeds.
  std::size_t improved = 0;
  std::size_t ties = 0;
  double sign_test_p = 1.0;
};

// Trains the net for every (K, seed) with the template config (its restarts and
// master_seed are overridden) and measures the L1 and squared L2 errors with
// n_mc samples from stream (eval, K, 0) of that seed.
OverallReport overall_error_experiment(const BoundInputs& inputs, const DataModel& model,
                                       const TrainConfig& config, std::span<const std::size_t> restarts,
                                       std::span<const std::uint64_t> seeds, std::size_t n_mc,
                                       unsigned threads = 0);

}  // namespace erm
