#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pilube/dataset.hpp"

namespace pilube {

enum class Activation { Tanh, Logistic };

Activation parse_activation(const std::string& name);
std::string to_string(Activation a);

/// Lower/upper bound pair in target units. Bounds may cross; see metrics.
struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Single hidden layer, two linear outputs (lower, upper).
///
/// Weight layout in `weights`:
///   [ W1 (hidden x input_dim, row-major) | b1 (hidden) | W2 (2 x hidden) | b2 (2) ]
struct MlpModel {
    std::size_t input_dim = 5;
    std::size_t hidden = 8;
    Activation activation = Activation::Tanh;
    std::vector<double> weights;

    static std::size_t weight_count(std::size_t input_dim, std::size_t hidden) {
        return input_dim * hidden + hidden + hidden * 2 + 2;
    }
    std::size_t weight_count() const { return weight_count(input_dim, hidden); }

    /// Architecture with all-zero weights.
    static MlpModel zeros(std::size_t input_dim, std::size_t hidden, Activation act = Activation::Tanh);

    /// Throws if the weight vector does not match the architecture or is non-finite.
    void validate() const;

    std::string to_json() const;
    static MlpModel from_json(const std::string& text);
};

Interval forward(const MlpModel& model, std::span<const double> features);

/// Uniform [-scale, scale] weights for the given architecture.
MlpModel init_weights(const MlpModel& architecture, std::uint64_t seed, double scale = 0.5);

/// Rows per kernel chunk. Every chunk is evaluated by the same vectorized
/// code regardless of how chunks are scheduled, so serial and parallel
/// predictions are bit-identical for any thread count.
inline constexpr std::size_t kRowChunk = 256;

/// Batch forward over a column-major feature matrix: column k occupies
/// columns[k * rows, (k + 1) * rows). OpenMP-parallel over chunks.
void predict_columns(const MlpModel& model, std::span<const double> columns, std::size_t rows,
                     std::span<Interval> out);

/// Serial reference for predict_columns.
void predict_columns_serial(const MlpModel& model, std::span<const double> columns, std::size_t rows,
                            std::span<Interval> out);

std::vector<Interval> predict_dataset(const MlpModel& model, const Split& split);

/// Applies `norm` to raw windows before the forward pass.
std::vector<Interval> predict_dataset(const MlpModel& model, const std::vector<SampleWindow>& windows,
                                      const FeatureScaling& norm);

}  // namespace pilube
