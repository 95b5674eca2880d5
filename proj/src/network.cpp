#include "pilube/network.hpp"

#include "kernel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace pilube {

namespace {

// Hidden sizes are bounded so that model files cannot request absurd layers.
constexpr std::size_t kMaxHidden = 256;

void check_model(const MlpModel& model) {
    if (model.input_dim == 0 || model.hidden == 0) throw std::invalid_argument("MlpModel: empty layer");
    if (model.weights.size() != model.weight_count())
        throw std::invalid_argument("MlpModel: weight vector does not match architecture");
    if (model.hidden > kMaxHidden) throw std::invalid_argument("MlpModel: hidden layer too large");
}

void check_batch(const MlpModel& model, std::span<const double> columns, std::size_t rows,
                 std::span<Interval> out) {
    check_model(model);
    if (out.size() != rows) throw std::invalid_argument("predict: output size does not match rows");
    if (columns.size() != rows * model.input_dim)
        throw std::invalid_argument("predict: feature matrix does not match input_dim");
}

}  // namespace

Activation parse_activation(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "logistic" || name == "sigmoid") return Activation::Logistic;
    throw std::invalid_argument("unknown activation '" + name + "'");
}

std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "logistic"; }

MlpModel MlpModel::zeros(std::size_t input_dim, std::size_t hidden, Activation act) {
    if (input_dim == 0 || hidden == 0) throw std::invalid_argument("MlpModel: empty layer");
    MlpModel m;
    m.input_dim = input_dim;
    m.hidden = hidden;
    m.activation = act;
    m.weights.assign(weight_count(input_dim, hidden), 0.0);
    return m;
}

void MlpModel::validate() const {
    if (input_dim == 0 || hidden == 0) throw std::invalid_argument("MlpModel: empty layer");
    if (hidden > kMaxHidden) throw std::invalid_argument("MlpModel: hidden layer too large");
    if (weights.size() != weight_count())
        throw std::invalid_argument("MlpModel: expected " + std::to_string(weight_count()) + " weights, got " +
                                    std::to_string(weights.size()));
    for (double w : weights) {
        if (!std::isfinite(w)) throw std::invalid_argument("MlpModel: non-finite weight");
    }
}

std::string MlpModel::to_json() const {
    nlohmann::json j;
    j["input_dim"] = input_dim;
    j["hidden"] = hidden;
    j["activation"] = to_string(activation);
    j["weights"] = weights;
    return j.dump();
}

MlpModel MlpModel::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    MlpModel m;
    m.input_dim = j.at("input_dim").get<std::size_t>();
    m.hidden = j.at("hidden").get<std::size_t>();
    m.activation = parse_activation(j.at("activation").get<std::string>());
    m.weights = j.at("weights").get<std::vector<double>>();
    m.validate();
    return m;
}

Interval forward(const MlpModel& model, std::span<const double> features) {
    if (features.size() != model.input_dim)
        throw std::invalid_argument("forward: expected " + std::to_string(model.input_dim) + " features, got " +
                                    std::to_string(features.size()));
    check_model(model);
    // a one-row column-major matrix is the feature vector itself
    Interval out;
    detail::forward_chunk(model, features.data(), 1, 0, 1, &out);
    return out;
}

MlpModel init_weights(const MlpModel& architecture, std::uint64_t seed, double scale) {
    if (!(scale > 0)) throw std::invalid_argument("init_weights: scale must be positive");
    MlpModel m = MlpModel::zeros(architecture.input_dim, architecture.hidden, architecture.activation);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (auto& w : m.weights) w = u(rng);
    return m;
}

void predict_columns(const MlpModel& model, std::span<const double> columns, std::size_t rows,
                     std::span<Interval> out) {
    check_batch(model, columns, rows, out);
    const auto chunks = static_cast<std::ptrdiff_t>((rows + kRowChunk - 1) / kRowChunk);
#pragma omp parallel for schedule(static) if (chunks > 8)
    for (std::ptrdiff_t c = 0; c < chunks; ++c) {
        const std::size_t first = static_cast<std::size_t>(c) * kRowChunk;
        detail::forward_chunk(model, columns.data(), rows, first, std::min(kRowChunk, rows - first),
                              out.data() + first);
    }
}

void predict_columns_serial(const MlpModel& model, std::span<const double> columns, std::size_t rows,
                            std::span<Interval> out) {
    check_batch(model, columns, rows, out);
    for (std::size_t first = 0; first < rows; first += kRowChunk) {
        detail::forward_chunk(model, columns.data(), rows, first, std::min(kRowChunk, rows - first),
                              out.data() + first);
    }
}

std::vector<Interval> predict_dataset(const MlpModel& model, const Split& split) {
    if (split.size() == 0) throw std::invalid_argument("predict_dataset: empty split");
    if (split.input_dim != model.input_dim) throw std::invalid_argument("predict_dataset: dimension mismatch");
    std::vector<Interval> out(split.size());
    predict_columns(model, split.columns, split.size(), out);
    return out;
}

std::vector<Interval> predict_dataset(const MlpModel& model, const std::vector<SampleWindow>& windows,
                                      const FeatureScaling& norm) {
    if (windows.empty()) throw std::invalid_argument("predict_dataset: no windows");
    std::vector<Interval> out;
    out.reserve(windows.size());
    for (const auto& w : windows) {
        const auto x = norm.apply(w.features);
        out.push_back(forward(model, x));
    }
    return out;
}

}  // namespace pilube
