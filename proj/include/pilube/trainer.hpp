#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pilube/costs.hpp"
#include "pilube/dataset.hpp"
#include "pilube/metrics.hpp"
#include "pilube/network.hpp"

namespace pilube {

struct AnnealConfig {
    std::size_t max_iters = 2000;
    double t0 = 1.0;
    double cooling = 0.995;
    double step_scale = 0.1;
    double perturb_fraction = 0.2;
    std::uint64_t seed = 1;
    std::size_t restarts = 4;
    double init_scale = 0.5;

    void validate() const;
    /// T_k = t0 * cooling^k.
    double temperature(std::size_t k) const;
};

struct TraceRecord {
    std::size_t iter = 0;  // 1-based
    double cost = 0.0;     // training cost of the current (accepted) state
    double picp = 0.0;     // validation
    double pinaw = 0.0;    // validation
    double temperature = 0.0;
};

struct TrainingTrace {
    std::vector<TraceRecord> records;
    /// First iteration with |1 - alpha + delta - PICP| < 0.01 on validation.
    std::optional<std::size_t> iter_picp_1pct;
    /// First iteration with validation PINAW < 1.5 x the final best PINAW.
    std::optional<std::size_t> iter_pinaw_15;
    bool converged = false;
    bool aborted = false;  // a non-finite cost was encountered
    double best_cost = 0.0;
    PiMetrics final_metrics;  // validation metrics of the returned model

    /// One JSON object per iteration: {iter, cost, picp, pinaw, temperature}.
    std::string to_jsonl() const;
};

struct TrainedModel {
    MlpModel model;  // best-cost weights, not the last state
    TrainingTrace trace;
    CostSpec spec;
};

/// Thresholds of a plausible ("logical") interval set.
inline constexpr double kLogicalPinawMax = 0.9;
inline constexpr double kMilestonePicpTolerance = 0.01;
inline constexpr double kMilestonePinawFactor = 1.5;

/// PICP in [1 - 2 alpha, 1] and 0 < PINAW < 0.9.
bool is_logical_pi(const PiMetrics& m, double alpha);

/// Metropolis rule: 1 for downhill moves, exp(-delta / T) otherwise.
double acceptance_probability(double delta_cost, double temperature);

/// Gaussian noise of std step_scale * T / t0 on ceil(perturb_fraction * len)
/// uniformly chosen coordinates.
std::vector<double> propose_neighbor(const std::vector<double>& weights, const AnnealConfig& config,
                                     double temperature, std::mt19937_64& rng);

/// Milestones recomputed from a finished trace.
std::optional<std::size_t> first_picp_within(const std::vector<TraceRecord>& records, double coverage_target,
                                             double tolerance = kMilestonePicpTolerance);
std::optional<std::size_t> first_pinaw_below(const std::vector<TraceRecord>& records, double limit);

/// Simulated annealing of model0 against `spec` on the training split;
/// validation metrics recorded each iteration.
TrainedModel anneal(const Dataset& data, const MlpModel& model0, const CostSpec& spec, const AnnealConfig& config);

/// Seed of stream `index` derived from `master` (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct RestartResult {
    TrainedModel best;
    bool best_is_logical = false;
    std::vector<TrainedModel> runs;  // every restart, in order
};

/// `config.restarts` anneals from independent initializations; restart r uses
/// init seed derive_seed(derive_seed(config.seed, r), 0) and anneal seed
/// derive_seed(derive_seed(config.seed, r), 1). Picks the lowest best cost
/// among logical results, else the lowest overall.
RestartResult multi_restart(const Dataset& data, const MlpModel& architecture, const CostSpec& spec,
                            const AnnealConfig& config);

/// Initial weights used by restart r of multi_restart.
MlpModel restart_initial_model(const MlpModel& architecture, const AnnealConfig& config, std::size_t restart);

}  // namespace pilube
