#include "pilube/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace pilube {

void AnnealConfig::validate() const {
    if (max_iters < 1) throw std::invalid_argument("AnnealConfig: max_iters must be >= 1");
    if (!(t0 > 0)) throw std::invalid_argument("AnnealConfig: t0 must be positive");
    if (!(cooling > 0 && cooling < 1)) throw std::invalid_argument("AnnealConfig: cooling must be in (0,1)");
    if (!(step_scale > 0)) throw std::invalid_argument("AnnealConfig: step_scale must be positive");
    if (!(perturb_fraction > 0 && perturb_fraction <= 1))
        throw std::invalid_argument("AnnealConfig: perturb_fraction must be in (0,1]");
    if (restarts < 1) throw std::invalid_argument("AnnealConfig: restarts must be >= 1");
    if (!(init_scale > 0)) throw std::invalid_argument("AnnealConfig: init_scale must be positive");
}

double AnnealConfig::temperature(std::size_t k) const { return t0 * std::pow(cooling, static_cast<double>(k)); }

std::string TrainingTrace::to_jsonl() const {
    std::string out;
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["iter"] = r.iter;
        j["cost"] = r.cost;
        j["picp"] = r.picp;
        j["pinaw"] = r.pinaw;
        j["temperature"] = r.temperature;
        out += j.dump();
        out += '\n';
    }
    return out;
}

bool is_logical_pi(const PiMetrics& m, double alpha) {
    return m.picp >= 1.0 - 2.0 * alpha && m.picp <= 1.0 && m.pinaw > 0.0 && m.pinaw < kLogicalPinawMax;
}

double acceptance_probability(double delta_cost, double temperature) {
    if (delta_cost <= 0) return 1.0;
    return std::exp(-delta_cost / temperature);
}

std::vector<double> propose_neighbor(const std::vector<double>& weights, const AnnealConfig& config,
                                     double temperature, std::mt19937_64& rng) {
    config.validate();
    std::vector<double> next = weights;
    const std::size_t len = weights.size();
    if (len == 0) return next;
    const auto k = std::min(
        len, static_cast<std::size_t>(std::ceil(config.perturb_fraction * static_cast<double>(len) - 1e-12)));
    std::vector<std::size_t> idx(len);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // partial Fisher-Yates: the first k entries are a uniform k-subset
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, len - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    std::normal_distribution<double> noise(0.0, config.step_scale * temperature / config.t0);
    for (std::size_t i = 0; i < k; ++i) next[idx[i]] += noise(rng);
    return next;
}

std::optional<std::size_t> first_picp_within(const std::vector<TraceRecord>& records, double coverage_target,
                                             double tolerance) {
    for (const auto& r : records) {
        if (std::abs(coverage_target - r.picp) < tolerance) return r.iter;
    }
    return std::nullopt;
}

std::optional<std::size_t> first_pinaw_below(const std::vector<TraceRecord>& records, double limit) {
    for (const auto& r : records) {
        if (r.pinaw < limit) return r.iter;
    }
    return std::nullopt;
}

namespace {

struct Evaluator {
    const Dataset& data;
    const CostSpec& spec;
    std::vector<Interval> train_buf;
    std::vector<Interval> val_buf;

    Evaluator(const Dataset& d, const CostSpec& s)
        : data(d), spec(s), train_buf(d.train.size()), val_buf(d.validation.size()) {}

    double train_cost(const MlpModel& m) {
        predict_columns(m, data.train.columns, data.train.size(), train_buf);
        const auto metrics = compute_metrics(data.train.targets, train_buf, data.range_R, spec.alpha, spec.sigma_p);
        return evaluate(spec, metrics, data.train.size());
    }

    PiMetrics validation(const MlpModel& m) {
        predict_columns(m, data.validation.columns, data.validation.size(), val_buf);
        return compute_metrics(data.validation.targets, val_buf, data.range_R, spec.alpha, spec.sigma_p);
    }
};

}  // namespace

TrainedModel anneal(const Dataset& data, const MlpModel& model0, const CostSpec& spec, const AnnealConfig& config) {
    config.validate();
    spec.validate();
    model0.validate();
    if (data.train.size() == 0 || data.validation.size() == 0)
        throw std::invalid_argument("anneal: empty training or validation split");
    if (model0.input_dim != data.input_dim())
        throw std::invalid_argument("anneal: model expects " + std::to_string(model0.input_dim) +
                                    " inputs, dataset provides " + std::to_string(data.input_dim()));

    Evaluator eval(data, spec);
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    TrainedModel result{model0, {}, spec};
    auto& trace = result.trace;
    trace.records.reserve(config.max_iters);

    MlpModel current = model0;
    double current_cost = eval.train_cost(current);
    PiMetrics current_val = eval.validation(current);
    double best_cost = current_cost;
    if (!std::isfinite(current_cost)) trace.aborted = true;

    MlpModel candidate = current;
    for (std::size_t k = 0; k < config.max_iters && !trace.aborted; ++k) {
        const double temp = config.temperature(k);
        candidate.weights = propose_neighbor(current.weights, config, temp, rng);
        const double cand_cost = eval.train_cost(candidate);
        const double u = unit(rng);
        if (!std::isfinite(cand_cost)) {
            trace.aborted = true;
        } else if (u < acceptance_probability(cand_cost - current_cost, temp)) {
            std::swap(current.weights, candidate.weights);
            current_cost = cand_cost;
            current_val = eval.validation(current);
            if (current_cost < best_cost) {
                best_cost = current_cost;
                result.model = current;
            }
        }
        trace.records.push_back({k + 1, current_cost, current_val.picp, current_val.pinaw, temp});
    }

    trace.best_cost = best_cost;
    trace.final_metrics = eval.validation(result.model);
    trace.iter_picp_1pct = first_picp_within(trace.records, spec.coverage_target());
    trace.iter_pinaw_15 = first_pinaw_below(trace.records, kMilestonePinawFactor * trace.final_metrics.pinaw);
    trace.converged = !trace.aborted && is_logical_pi(trace.final_metrics, spec.alpha);
    return result;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

MlpModel restart_initial_model(const MlpModel& architecture, const AnnealConfig& config, std::size_t restart) {
    return init_weights(architecture, derive_seed(derive_seed(config.seed, restart), 0), config.init_scale);
}

RestartResult multi_restart(const Dataset& data, const MlpModel& architecture, const CostSpec& spec,
                            const AnnealConfig& config) {
    config.validate();
    RestartResult out;
    out.runs.reserve(config.restarts);
    for (std::size_t r = 0; r < config.restarts; ++r) {
        AnnealConfig run_cfg = config;
        run_cfg.seed = derive_seed(derive_seed(config.seed, r), 1);
        out.runs.push_back(anneal(data, restart_initial_model(architecture, config, r), spec, run_cfg));
    }
    std::optional<std::size_t> best_logical, best_any;
    for (std::size_t r = 0; r < out.runs.size(); ++r) {
        const auto& t = out.runs[r].trace;
        if (t.aborted) continue;
        if (!best_any || t.best_cost < out.runs[*best_any].trace.best_cost) best_any = r;
        if (t.converged && (!best_logical || t.best_cost < out.runs[*best_logical].trace.best_cost))
            best_logical = r;
    }
    out.best_is_logical = best_logical.has_value();
    out.best = out.runs[best_logical.value_or(best_any.value_or(0))];
    return out;
}

}  // namespace pilube
