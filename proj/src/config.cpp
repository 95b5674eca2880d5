#include "pilube/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pilube {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!allowed.count(key)) throw std::invalid_argument("config: unknown key '" + where + key + "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void apply_override(json& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("config: override '" + assignment + "' is not key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    json* node = &root;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    // numeric parts index into arrays, e.g. costs.0.alpha=0.05
    auto step = [&](json* at, const std::string& key) -> json& {
        if (at->is_array()) {
            std::size_t idx = 0;
            auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
            if (ec != std::errc() || ptr != key.data() + key.size() || idx >= at->size())
                throw std::invalid_argument("config: override path '" + path + "' has a bad array index");
            return (*at)[idx];
        }
        if (!at->is_object()) throw std::invalid_argument("config: override path '" + path + "' is not an object");
        return (*at)[key];
    };
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        node = &step(node, parts[i]);
        if (node->is_null()) *node = json::object();
    }
    if (parts.empty()) throw std::invalid_argument("config: empty override path");
    step(node, parts.back()) = value;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::vector<std::string>& overrides) {
    json root = text.empty() ? json::object() : json::parse(text);
    for (const auto& o : overrides) apply_override(root, o);
    reject_unknown(root, {"seed", "data", "network", "anneal", "costs", "n_trials", "alphas"}, "");

    ExperimentConfig c;
    read(root, "seed", c.seed);
    read(root, "n_trials", c.n_trials);
    read(root, "alphas", c.alphas);

    if (root.contains("data")) {
        const auto& d = root.at("data");
        reject_unknown(d, {"source", "csv", "synthetic", "lags", "horizon", "fractions"}, "data.");
        read(d, "source", c.data.source);
        read(d, "lags", c.data.lags);
        read(d, "horizon", c.data.horizon);
        if (d.contains("fractions")) {
            const auto f = d.at("fractions").get<std::vector<double>>();
            if (f.size() != 3) throw std::invalid_argument("config: data.fractions needs 3 values");
            c.data.fractions = {f[0], f[1], f[2]};
        }
        if (d.contains("csv")) {
            const auto& cs = d.at("csv");
            reject_unknown(cs, {"path", "time_col", "value_col"}, "data.csv.");
            read(cs, "path", c.data.csv_path);
            read(cs, "time_col", c.data.time_col);
            read(cs, "value_col", c.data.value_col);
        }
        if (d.contains("synthetic")) {
            const auto& s = d.at("synthetic");
            reject_unknown(s, {"length", "period", "noise_kind", "seed", "sample_interval_s"}, "data.synthetic.");
            read(s, "length", c.data.synthetic.length);
            read(s, "period", c.data.synthetic.period);
            read(s, "seed", c.data.synthetic.seed);
            read(s, "sample_interval_s", c.data.synthetic.sample_interval_s);
            if (s.contains("noise_kind")) c.data.synthetic.noise_kind = parse_noise_kind(s.at("noise_kind").get<std::string>());
        }
        if (c.data.source != "synthetic" && c.data.source != "csv")
            throw std::invalid_argument("config: data.source must be 'synthetic' or 'csv'");
    }
    if (root.contains("network")) {
        const auto& n = root.at("network");
        reject_unknown(n, {"hidden", "activation", "sizes"}, "network.");
        read(n, "hidden", c.hidden);
        read(n, "sizes", c.sizes);
        if (n.contains("activation")) c.activation = parse_activation(n.at("activation").get<std::string>());
    }
    if (root.contains("anneal")) {
        const auto& a = root.at("anneal");
        reject_unknown(a, {"max_iters", "t0", "cooling", "step_scale", "perturb_fraction", "restarts", "init_scale"},
                       "anneal.");
        read(a, "max_iters", c.anneal.max_iters);
        read(a, "t0", c.anneal.t0);
        read(a, "cooling", c.anneal.cooling);
        read(a, "step_scale", c.anneal.step_scale);
        read(a, "perturb_fraction", c.anneal.perturb_fraction);
        read(a, "restarts", c.anneal.restarts);
        read(a, "init_scale", c.anneal.init_scale);
    }
    c.anneal.seed = c.seed;
    c.anneal.validate();
    if (root.contains("costs")) {
        const auto& cs = root.at("costs");
        if (!cs.is_array() || cs.empty()) throw std::invalid_argument("config: 'costs' must be a nonempty array");
        c.costs.clear();
        for (const auto& s : cs) c.costs.push_back(CostSpec::from_json(s.dump()));
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), overrides);
}

std::string ExperimentConfig::to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    nlohmann::ordered_json d;
    d["source"] = data.source;
    if (data.source == "csv") {
        d["csv"] = {{"path", data.csv_path}, {"time_col", data.time_col}, {"value_col", data.value_col}};
    } else {
        d["synthetic"] = {{"length", data.synthetic.length},
                          {"period", data.synthetic.period},
                          {"noise_kind", to_string(data.synthetic.noise_kind)},
                          {"seed", data.synthetic.seed},
                          {"sample_interval_s", data.synthetic.sample_interval_s}};
    }
    d["lags"] = data.lags;
    d["horizon"] = data.horizon;
    d["fractions"] = data.fractions;
    j["data"] = d;
    j["network"] = {{"hidden", hidden}, {"activation", to_string(activation)}, {"sizes", sizes}};
    j["anneal"] = {{"max_iters", anneal.max_iters},         {"t0", anneal.t0},
                   {"cooling", anneal.cooling},             {"step_scale", anneal.step_scale},
                   {"perturb_fraction", anneal.perturb_fraction}, {"restarts", anneal.restarts},
                   {"init_scale", anneal.init_scale}};
    auto costs_json = nlohmann::ordered_json::array();
    for (const auto& s : costs) costs_json.push_back(nlohmann::ordered_json::parse(s.to_json()));
    j["costs"] = costs_json;
    j["n_trials"] = n_trials;
    j["alphas"] = alphas;
    return j.dump(2);
}

Dataset build_dataset(const DataConfig& cfg) {
    TimeSeries series = cfg.source == "csv" ? load_csv(cfg.csv_path, cfg.time_col, cfg.value_col)
                                            : generate_synthetic(cfg.synthetic).series;
    return split_chronological(make_windows(series, cfg.lags, cfg.horizon), cfg.fractions);
}

}  // namespace pilube
