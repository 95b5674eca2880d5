#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pilube {

/// Univariate series with strictly increasing timestamps (seconds since epoch).
struct TimeSeries {
    std::vector<double> timestamps;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Hours in [0, 24) of a UNIX timestamp: hour + minutes / 60.
double time_of_day(double timestamp);

/// Lagged values followed by the time of day of the target.
struct SampleWindow {
    std::vector<double> features;
    double target = 0.0;
    double timestamp = 0.0;        // of the target sample
    std::size_t target_index = 0;  // position of the target in the source series
};

/// Affine per-feature map x -> (x - offset) / span.
struct FeatureScaling {
    std::vector<double> offset;
    std::vector<double> span;

    std::vector<double> apply(const std::vector<double>& raw) const;
    std::vector<double> invert(const std::vector<double>& scaled) const;
};

/// One chronological split. `features` (row-major) and `columns`
/// (column-major) hold the same scaled `size() * input_dim` entries.
struct Split {
    std::vector<SampleWindow> windows;
    std::vector<double> features;
    std::vector<double> columns;
    std::vector<double> targets;
    std::size_t input_dim = 0;

    std::size_t size() const { return targets.size(); }
    const double* row(std::size_t i) const { return features.data() + i * input_dim; }
};

struct Dataset {
    Split train;
    Split validation;
    Split test;
    double range_R = 0.0;  // max - min of the training targets
    FeatureScaling norm;

    std::size_t input_dim() const { return train.input_dim; }
};

/// Reads a CSV with a header row. Timestamps are either numeric (epoch
/// seconds) or ISO-8601 "YYYY-MM-DD[ T]HH:MM[:SS]" interpreted as UTC.
/// Throws std::runtime_error on missing file/column, unparseable rows
/// (all offending row numbers are listed) and duplicate timestamps.
TimeSeries load_csv(const std::filesystem::path& path, const std::string& time_col,
                    const std::string& value_col);

/// Writes the series with header `time_col,value_col`.
void write_csv(const TimeSeries& series, const std::filesystem::path& path,
               const std::string& time_col = "timestamp", const std::string& value_col = "value");

std::vector<SampleWindow> make_windows(const TimeSeries& series, std::size_t lags = 4,
                                       std::size_t horizon = 1);

/// Contiguous train/validation/test split. Scaling of lag features and R
/// are fitted on the training split only; time of day is divided by 24.
Dataset split_chronological(const std::vector<SampleWindow>& windows,
                            std::array<double, 3> fractions = {0.70, 0.15, 0.15});

enum class NoiseKind { GaussianHeteroscedastic, LognormalSkewed };

struct SynthSpec {
    std::size_t length = 5000;
    std::size_t period = 288;
    NoiseKind noise_kind = NoiseKind::GaussianHeteroscedastic;
    std::uint64_t seed = 1;
    double sample_interval_s = 300.0;  // five-minute samples

    void validate() const;
};

/// Exact conditional quantiles of a generated series.
class QuantileOracle {
public:
    QuantileOracle(NoiseKind kind, std::vector<double> signal, std::vector<double> scale);

    /// p-quantile of the value at series index i.
    double quantile(std::size_t i, double p) const;
    /// Width of the central (1 - alpha) interval at index i.
    double central_width(std::size_t i, double alpha) const;

    double signal(std::size_t i) const { return signal_.at(i); }
    double scale(std::size_t i) const { return scale_.at(i); }
    std::size_t size() const { return signal_.size(); }
    NoiseKind kind() const { return kind_; }

    /// Noise scale as a function of the clean signal: 0.05 + 0.15 |s|.
    static double noise_scale(double s);

private:
    NoiseKind kind_;
    std::vector<double> signal_;
    std::vector<double> scale_;
};

struct SyntheticSeries {
    TimeSeries series;
    QuantileOracle oracle;
};

SyntheticSeries generate_synthetic(const SynthSpec& spec);

NoiseKind parse_noise_kind(const std::string& name);
std::string to_string(NoiseKind kind);

}  // namespace pilube
