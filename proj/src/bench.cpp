#include "pilube/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pilube {

namespace {

using nlohmann::ordered_json;

ordered_json metrics_json(const PiMetrics& m) { return ordered_json::parse(m.to_json()); }

ordered_json optional_json(const std::optional<std::size_t>& v) { return v ? ordered_json(*v) : ordered_json(); }

std::optional<std::size_t> optional_from(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<std::size_t>();
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

// Runs body(i) for i in [0, n), in parallel if requested. Exceptions are
// rethrown for the lowest failing index.
template <typename Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

TrialRecord run_one_trial(const Dataset& data, const MlpModel& architecture, const CostSpec& spec,
                          const AnnealConfig& config, std::size_t trial) {
    AnnealConfig cfg = config;
    cfg.seed = derive_seed(config.seed, trial);
    const auto result = multi_restart(data, architecture, spec, cfg);

    TrialRecord rec;
    rec.trial = trial;
    rec.seed = cfg.seed;
    const auto& best = result.best;
    rec.converged = best.trace.converged;
    rec.train_cost = best.trace.best_cost;
    rec.validation = best.trace.final_metrics;
    const auto test_iv = predict_dataset(best.model, data.test);
    rec.test = compute_metrics(data.test.targets, test_iv, data.range_R, spec.alpha, spec.sigma_p);
    rec.iter_picp_1pct = best.trace.iter_picp_1pct;
    rec.iter_pinaw_15 = best.trace.iter_pinaw_15;
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
        rec.restart_iter_picp_1pct.push_back(result.runs[r].trace.iter_picp_1pct);
        h = hash_weights(restart_initial_model(architecture, cfg, r).weights, h);
    }
    rec.init_hash = h;
    return rec;
}

}  // namespace

std::uint64_t hash_weights(const std::vector<double>& weights, std::uint64_t h) {
    for (double w : weights) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &w, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

std::string TrialRecord::to_json() const {
    ordered_json j;
    j["trial"] = trial;
    j["seed"] = seed;
    j["converged"] = converged;
    j["train_cost"] = train_cost;
    j["validation"] = metrics_json(validation);
    j["test"] = metrics_json(test);
    j["iter_picp_1pct"] = optional_json(iter_picp_1pct);
    j["iter_pinaw_15"] = optional_json(iter_pinaw_15);
    ordered_json restarts = ordered_json::array();
    for (const auto& v : restart_iter_picp_1pct) restarts.push_back(optional_json(v));
    j["restart_iter_picp_1pct"] = restarts;
    j["init_hash"] = init_hash;
    return j.dump();
}

TrialRecord TrialRecord::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    TrialRecord r;
    r.trial = j.at("trial").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.converged = j.at("converged").get<bool>();
    r.train_cost = j.at("train_cost").get<double>();
    r.validation = PiMetrics::from_json(j.at("validation").dump());
    r.test = PiMetrics::from_json(j.at("test").dump());
    r.iter_picp_1pct = optional_from(j.at("iter_picp_1pct"));
    r.iter_pinaw_15 = optional_from(j.at("iter_pinaw_15"));
    for (const auto& v : j.at("restart_iter_picp_1pct")) r.restart_iter_picp_1pct.push_back(optional_from(v));
    r.init_hash = j.at("init_hash").get<std::uint64_t>();
    return r;
}

std::string TrialStats::to_json() const {
    ordered_json j;
    j["cost_kind"] = to_string(cost_kind);
    j["alpha"] = alpha;
    j["n_trials"] = n_trials;
    j["n_converged"] = n_converged;
    j["mu_pinaw"] = mu_pinaw;
    j["mu_picp"] = mu_picp;
    j["sigma_picp"] = sigma_picp;
    j["mu_pinafd"] = mu_pinafd;
    j["mu_cwc"] = mu_cwc;
    j["mu_cwfdc"] = mu_cwfdc;
    j["median_iter_picp_1pct"] = median_iter_picp_1pct ? ordered_json(*median_iter_picp_1pct) : ordered_json();
    j["median_iter_pinaw_15"] = median_iter_pinaw_15 ? ordered_json(*median_iter_pinaw_15) : ordered_json();
    j["convergence_rate"] = convergence_rate;
    j["reliable"] = reliable;
    return j.dump();
}

double aggregate_cwc(double mu_pinaw_pct, double mu_picp, double pinc, double eta) {
    return mu_pinaw_pct + (mu_picp < pinc ? std::expm1(eta * (pinc - mu_picp)) : 0.0);
}

double aggregate_cwfdc(double mu_pinaw_pct, double mu_pinafd_pct, double mu_picp, double alpha, double delta) {
    const double gap = 1.0 - alpha + delta - mu_picp;
    return mu_pinaw_pct + mu_pinafd_pct + kAggregateBeta * gap * gap;
}

double sample_std(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::optional<double> median(std::vector<double> values) {
    if (values.empty()) return std::nullopt;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

TrialStats aggregate(const std::vector<TrialRecord>& records, const CostSpec& spec) {
    TrialStats s;
    s.cost_kind = spec.kind;
    s.alpha = spec.alpha;
    s.n_trials = records.size();
    std::vector<double> picps, pinaws, pinafds, it_picp, it_pinaw;
    for (const auto& r : records) {
        if (r.iter_picp_1pct) it_picp.push_back(static_cast<double>(*r.iter_picp_1pct));
        if (r.iter_pinaw_15) it_pinaw.push_back(static_cast<double>(*r.iter_pinaw_15));
        if (!r.converged) continue;
        picps.push_back(r.test.picp);
        pinaws.push_back(r.test.pinaw);
        pinafds.push_back(r.test.pinafd);
    }
    s.n_converged = picps.size();
    s.convergence_rate = records.empty() ? 0.0 : static_cast<double>(s.n_converged) / static_cast<double>(records.size());
    s.reliable = s.n_converged >= 2;
    auto mean = [](const std::vector<double>& v) {
        return v.empty() ? std::numeric_limits<double>::quiet_NaN()
                         : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    const double mu_picp = mean(picps);
    s.mu_picp = 100.0 * mu_picp;
    s.mu_pinaw = 100.0 * mean(pinaws);
    s.mu_pinafd = 100.0 * mean(pinafds);
    s.sigma_picp = 100.0 * sample_std(picps);
    s.mu_cwc = aggregate_cwc(s.mu_pinaw, mu_picp, spec.pinc(), spec.eta);
    s.mu_cwfdc = aggregate_cwfdc(s.mu_pinaw, s.mu_pinafd, mu_picp, spec.alpha, spec.delta_or_default());
    s.median_iter_picp_1pct = median(it_picp);
    s.median_iter_pinaw_15 = median(it_pinaw);
    return s;
}

TrialReport run_trials(const Dataset& data, const MlpModel& architecture, const CostSpec& spec,
                       const AnnealConfig& config, std::size_t n_trials, Execution exec) {
    if (n_trials < 2) throw std::invalid_argument("run_trials: need at least 2 trials");
    config.validate();
    spec.validate();
    TrialReport report;
    report.spec = spec;
    report.records.resize(n_trials);
    for_each_index(n_trials, exec, [&](std::size_t k) {
        report.records[k] = run_one_trial(data, architecture, spec, config, k);
    });
    report.stats = aggregate(report.records, spec);
    return report;
}

std::vector<TrialReport> compare_costs(const Dataset& data, const MlpModel& architecture,
                                       const std::vector<CostSpec>& specs, const AnnealConfig& config,
                                       std::size_t n_trials, Execution exec) {
    if (specs.empty()) throw std::invalid_argument("compare_costs: empty spec list");
    if (n_trials < 2) throw std::invalid_argument("compare_costs: need at least 2 trials");
    for (const auto& s : specs) s.validate();
    config.validate();
    // one flat job list so every (spec, trial) pair can run concurrently
    std::vector<TrialReport> reports(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        reports[i].spec = specs[i];
        reports[i].records.resize(n_trials);
    }
    for_each_index(specs.size() * n_trials, exec, [&](std::size_t job) {
        const std::size_t i = job / n_trials;
        const std::size_t k = job % n_trials;
        reports[i].records[k] = run_one_trial(data, architecture, specs[i], config, k);
    });
    for (auto& r : reports) r.stats = aggregate(r.records, r.spec);
    return reports;
}

std::size_t choose_size(const std::vector<std::size_t>& sizes, const std::vector<double>& selection) {
    if (sizes.empty() || sizes.size() != selection.size())
        throw std::invalid_argument("choose_size: sizes and selection values must be nonempty and aligned");
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (!std::isfinite(selection[i])) continue;
        if (!best || selection[i] < selection[*best] ||
            (selection[i] == selection[*best] && sizes[i] < sizes[*best]))
            best = i;
    }
    if (!best) throw std::runtime_error("size_sweep: no logical PI found");
    return sizes[*best];
}

SweepResult size_sweep(const Dataset& data, const CostSpec& spec, const AnnealConfig& config,
                       const std::vector<std::size_t>& sizes, Activation activation, Execution exec) {
    if (sizes.empty()) throw std::invalid_argument("size_sweep: no sizes");
    spec.validate();
    config.validate();
    SweepResult out;
    out.sizes = sizes;
    out.selection.assign(sizes.size(), std::numeric_limits<double>::infinity());
    for_each_index(sizes.size(), exec, [&](std::size_t i) {
        const auto arch = MlpModel::zeros(data.input_dim(), sizes[i], activation);
        const auto result = multi_restart(data, arch, spec, config);
        if (result.best_is_logical)
            out.selection[i] = selection_value(spec, result.best.trace.final_metrics, data.validation.size());
    });
    out.chosen = choose_size(out.sizes, out.selection);
    return out;
}

std::string stats_table_csv(const std::vector<TrialStats>& rows) {
    std::ostringstream os;
    os << "cost_kind,alpha,n_trials,n_converged,mu_pinaw,mu_picp,sigma_picp,mu_pinafd,mu_cwc,mu_cwfdc,"
          "median_iter_picp_1pct,median_iter_pinaw_15,convergence_rate,reliable\n";
    for (const auto& s : rows) {
        os << to_string(s.cost_kind) << ',' << fmt(s.alpha) << ',' << s.n_trials << ',' << s.n_converged << ','
           << fmt(s.mu_pinaw) << ',' << fmt(s.mu_picp) << ',' << fmt(s.sigma_picp) << ',' << fmt(s.mu_pinafd) << ','
           << fmt(s.mu_cwc) << ',' << fmt(s.mu_cwfdc) << ',' << fmt(s.median_iter_picp_1pct) << ','
           << fmt(s.median_iter_pinaw_15) << ',' << fmt(s.convergence_rate) << ',' << (s.reliable ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string sweep_csv(const SweepResult& sweep) {
    std::ostringstream os;
    os << "hidden,selection,chosen\n";
    for (std::size_t i = 0; i < sweep.sizes.size(); ++i) {
        os << sweep.sizes[i] << ',' << fmt(sweep.selection[i]) << ',' << (sweep.sizes[i] == sweep.chosen ? 1 : 0)
           << '\n';
    }
    return os.str();
}

void emit_plot_data(const std::vector<std::pair<double, MlpModel>>& models, const Dataset& data,
                    const std::filesystem::path& out) {
    if (models.empty()) throw std::invalid_argument("emit_plot_data: no models");
    std::vector<std::vector<Interval>> bounds;
    bounds.reserve(models.size());
    for (const auto& [alpha, model] : models) bounds.push_back(predict_dataset(model, data.test));

    std::ofstream os(out);
    if (!os) throw std::runtime_error("emit_plot_data: cannot write " + out.string());
    os << "timestamp,target";
    for (const auto& [alpha, model] : models) os << ",lower_" << fmt(alpha) << ",upper_" << fmt(alpha);
    os << '\n';
    char buf[32];
    auto full = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t i = 0; i < data.test.size(); ++i) {
        os << full(data.test.windows[i].timestamp) << ',' << full(data.test.targets[i]);
        for (const auto& b : bounds) os << ',' << full(b[i].lower) << ',' << full(b[i].upper);
        os << '\n';
    }
}

}  // namespace pilube
