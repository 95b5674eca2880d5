#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pilube/costs.hpp"
#include "pilube/dataset.hpp"
#include "pilube/network.hpp"
#include "pilube/trainer.hpp"

namespace pilube {

enum class Execution { Serial, Parallel };

/// Outcome of one multi-restart training, evaluated on the test split.
struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    bool converged = false;
    double train_cost = 0.0;
    PiMetrics validation;
    PiMetrics test;
    std::optional<std::size_t> iter_picp_1pct;  // of the selected restart
    std::optional<std::size_t> iter_pinaw_15;
    std::vector<std::optional<std::size_t>> restart_iter_picp_1pct;
    std::uint64_t init_hash = 0;  // FNV-1a over every restart's initial weights

    std::string to_json() const;
    static TrialRecord from_json(const std::string& text);
};

/// Aggregates over trials. PICP, PINAW, PINAFD and the two tabulated
/// aggregates are in percent; means and sigma cover converged trials only.
struct TrialStats {
    CostKind cost_kind = CostKind::Cwfdc;
    double alpha = 0.0;
    std::size_t n_trials = 0;
    std::size_t n_converged = 0;
    double mu_pinaw = 0.0;
    double mu_picp = 0.0;
    double sigma_picp = 0.0;
    double mu_pinafd = 0.0;
    double mu_cwc = 0.0;
    double mu_cwfdc = 0.0;
    std::optional<double> median_iter_picp_1pct;
    std::optional<double> median_iter_pinaw_15;
    double convergence_rate = 0.0;
    bool reliable = false;  // at least two converged trials

    std::string to_json() const;
};

/// Coverage penalty factor in the tabulated CWFDC aggregate.
inline constexpr double kAggregateBeta = 1000.0;

/// mu_PINAW + gamma(mu_PICP), gamma the continuous LUBE penalty. Widths in
/// percent, coverage as a fraction; result in percent units.
double aggregate_cwc(double mu_pinaw_pct, double mu_picp, double pinc, double eta);
/// mu_PINAW + mu_PINAFD + 1000 (1 - alpha + delta - mu_PICP)^2, same units.
double aggregate_cwfdc(double mu_pinaw_pct, double mu_pinafd_pct, double mu_picp, double alpha, double delta);

/// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_std(const std::vector<double>& values);
/// Median of the values; nullopt if empty.
std::optional<double> median(std::vector<double> values);

TrialStats aggregate(const std::vector<TrialRecord>& records, const CostSpec& spec);

struct TrialReport {
    CostSpec spec;
    std::vector<TrialRecord> records;
    TrialStats stats;
};

/// Trial k runs multi_restart with master seed derive_seed(config.seed, k),
/// so trial k of every spec starts from the same initial weights.
TrialReport run_trials(const Dataset& data, const MlpModel& architecture, const CostSpec& spec,
                       const AnnealConfig& config, std::size_t n_trials, Execution exec = Execution::Parallel);

std::vector<TrialReport> compare_costs(const Dataset& data, const MlpModel& architecture,
                                       const std::vector<CostSpec>& specs, const AnnealConfig& config,
                                       std::size_t n_trials, Execution exec = Execution::Parallel);

struct SweepResult {
    std::vector<std::size_t> sizes;
    std::vector<double> selection;  // +inf where no restart gave a logical PI
    std::size_t chosen = 0;
};

/// Argmin of `selection` over `sizes`, ties to the smaller network.
/// Throws if every value is infinite ("no logical PI found").
std::size_t choose_size(const std::vector<std::size_t>& sizes, const std::vector<double>& selection);

SweepResult size_sweep(const Dataset& data, const CostSpec& spec, const AnnealConfig& config,
                       const std::vector<std::size_t>& sizes, Activation activation = Activation::Tanh,
                       Execution exec = Execution::Parallel);

/// CSV rows of a stats table, one row per report.
std::string stats_table_csv(const std::vector<TrialStats>& rows);
std::string sweep_csv(const SweepResult& sweep);

/// Test-split bounds per alpha: columns timestamp, target, lower_<a>, upper_<a>, ...
void emit_plot_data(const std::vector<std::pair<double, MlpModel>>& models, const Dataset& data,
                    const std::filesystem::path& out);

std::uint64_t hash_weights(const std::vector<double>& weights, std::uint64_t h = 14695981039346656037ULL);

}  // namespace pilube
