#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pilube/costs.hpp"
#include "pilube/dataset.hpp"
#include "pilube/network.hpp"
#include "pilube/trainer.hpp"

namespace pilube {

struct DataConfig {
    std::string source = "synthetic";  // "synthetic" or "csv"
    std::string csv_path;
    std::string time_col = "timestamp";
    std::string value_col = "value";
    SynthSpec synthetic;
    std::size_t lags = 4;
    std::size_t horizon = 1;
    std::array<double, 3> fractions = {0.70, 0.15, 0.15};
};

/// Everything a CLI run needs. Parsed from a JSON document; unknown keys
/// anywhere are errors.
///
///   {
///     "seed": 1,
///     "data": {"source": "synthetic", "synthetic": {"length": 5000, "period": 288,
///              "noise_kind": "gaussian-heteroscedastic", "seed": 7},
///              "lags": 4, "horizon": 1, "fractions": [0.7, 0.15, 0.15]},
///     "network": {"hidden": 8, "activation": "tanh", "sizes": [5, 6, ...]},
///     "anneal": {"max_iters": 2000, "t0": 1.0, "cooling": 0.995, ...},
///     "costs": [{"kind": "cwfdc", "alpha": 0.1}],
///     "n_trials": 20,
///     "alphas": [0.2, 0.05, 0.01]
///   }
struct ExperimentConfig {
    std::uint64_t seed = 1;
    DataConfig data;
    std::size_t hidden = 8;
    Activation activation = Activation::Tanh;
    std::vector<std::size_t> sizes = {5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};
    AnnealConfig anneal;
    std::vector<CostSpec> costs = {CostSpec{}};
    std::size_t n_trials = 20;
    std::vector<double> alphas = {0.20, 0.05, 0.01};

    /// Parses `text`, then applies "dotted.key=value" overrides. Override
    /// values are JSON when they parse as JSON, otherwise strings.
    static ExperimentConfig parse(const std::string& text, const std::vector<std::string>& overrides = {});
    static ExperimentConfig load(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

    std::string to_json() const;
};

/// Loads or generates the series and builds windows and splits.
Dataset build_dataset(const DataConfig& cfg);

}  // namespace pilube
