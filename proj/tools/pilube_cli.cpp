#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pilube/bench.hpp"
#include "pilube/config.hpp"

namespace fs = std::filesystem;
using namespace pilube;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out;
    bool serial = false;
};

void add_common(CLI::App* cmd, Common& c, const std::string& out_help) {
    cmd->add_option("-c,--config", c.config_path, "JSON experiment config");
    cmd->add_option("-s,--set", c.overrides, "override a config key, e.g. anneal.max_iters=500")->take_all();
    cmd->add_option("-o,--out", c.out, out_help);
    cmd->add_flag("--serial", c.serial, "run trials one after another");
}

ExperimentConfig load_config(const Common& c) {
    return c.config_path.empty() ? ExperimentConfig::parse("{}", c.overrides)
                                 : ExperimentConfig::load(c.config_path, c.overrides);
}

Execution execution(const Common& c) { return c.serial ? Execution::Serial : Execution::Parallel; }

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
}

void emit(const Common& c, const std::string& default_name, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    const fs::path p = fs::is_directory(c.out) ? fs::path(c.out) / default_name : fs::path(c.out);
    write_file(p, text);
}

std::string metrics_block(const Dataset& data, const MlpModel& model, const CostSpec& spec) {
    nlohmann::ordered_json j;
    for (const auto& [name, split] : {std::pair<const char*, const Split*>{"validation", &data.validation},
                                      std::pair<const char*, const Split*>{"test", &data.test}}) {
        const auto iv = predict_dataset(model, *split);
        const auto m = compute_metrics(split->targets, iv, data.range_R, spec.alpha, spec.sigma_p);
        j[name] = nlohmann::ordered_json::parse(m.to_json());
    }
    return j.dump(2) + "\n";
}

int run_synth(const Common& c) {
    const auto cfg = load_config(c);
    const auto syn = generate_synthetic(cfg.data.synthetic);
    const fs::path out = c.out.empty() ? fs::path("synthetic.csv") : fs::path(c.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_csv(syn.series, out);
    std::cerr << "wrote " << syn.series.size() << " samples to " << out.string() << "\n";
    return 0;
}

int run_train(const Common& c) {
    const auto cfg = load_config(c);
    const auto data = build_dataset(cfg.data);
    const auto& spec = cfg.costs.front();
    const auto arch = MlpModel::zeros(data.input_dim(), cfg.hidden, cfg.activation);
    const auto result = multi_restart(data, arch, spec, cfg.anneal);
    const auto& best = result.best;

    const fs::path dir = c.out.empty() ? fs::path("train_out") : fs::path(c.out);
    fs::create_directories(dir);
    write_file(dir / "model.json", best.model.to_json() + "\n");
    write_file(dir / "trace.jsonl", best.trace.to_jsonl());
    nlohmann::ordered_json summary;
    summary["cost"] = nlohmann::ordered_json::parse(spec.to_json());
    summary["converged"] = best.trace.converged;
    summary["logical"] = result.best_is_logical;
    summary["best_cost"] = best.trace.best_cost;
    summary["iter_picp_1pct"] = best.trace.iter_picp_1pct ? nlohmann::ordered_json(*best.trace.iter_picp_1pct)
                                                          : nlohmann::ordered_json();
    summary["iter_pinaw_15"] =
        best.trace.iter_pinaw_15 ? nlohmann::ordered_json(*best.trace.iter_pinaw_15) : nlohmann::ordered_json();
    summary["metrics"] = nlohmann::ordered_json::parse(metrics_block(data, best.model, spec));
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int run_sweep(const Common& c) {
    const auto cfg = load_config(c);
    const auto data = build_dataset(cfg.data);
    std::string text;
    for (const auto& spec : cfg.costs) {
        const auto sweep = size_sweep(data, spec, cfg.anneal, cfg.sizes, cfg.activation, execution(c));
        std::cerr << to_string(spec.kind) << ": chosen hidden size " << sweep.chosen << "\n";
        if (cfg.costs.size() > 1) text += "# " + to_string(spec.kind) + "\n";
        text += sweep_csv(sweep);
    }
    emit(c, "sweep.csv", text);
    return 0;
}

int run_bench(const Common& c) {
    const auto cfg = load_config(c);
    const auto data = build_dataset(cfg.data);
    const auto arch = MlpModel::zeros(data.input_dim(), cfg.hidden, cfg.activation);
    const auto reports = compare_costs(data, arch, cfg.costs, cfg.anneal, cfg.n_trials, execution(c));

    std::vector<TrialStats> rows;
    std::string stats_jsonl, trials_jsonl;
    for (const auto& r : reports) {
        rows.push_back(r.stats);
        stats_jsonl += r.stats.to_json() + "\n";
        for (const auto& rec : r.records) {
            auto j = nlohmann::ordered_json::parse(rec.to_json());
            j["cost_kind"] = to_string(r.spec.kind);
            trials_jsonl += j.dump() + "\n";
        }
    }
    const std::string table = stats_table_csv(rows);
    if (c.out.empty()) {
        std::cout << table;
        return 0;
    }
    const fs::path dir(c.out);
    fs::create_directories(dir);
    write_file(dir / "stats.csv", table);
    write_file(dir / "stats.jsonl", stats_jsonl);
    write_file(dir / "trials.jsonl", trials_jsonl);
    write_file(dir / "config.json", cfg.to_json() + "\n");
    std::cout << table;
    return 0;
}

int run_plotdata(const Common& c) {
    const auto cfg = load_config(c);
    const auto data = build_dataset(cfg.data);
    const auto arch = MlpModel::zeros(data.input_dim(), cfg.hidden, cfg.activation);
    std::vector<std::pair<double, MlpModel>> models(cfg.alphas.size());
    std::vector<std::exception_ptr> errors(cfg.alphas.size());
    const auto n = static_cast<std::ptrdiff_t>(cfg.alphas.size());
    // each alpha gets its own independently trained model
#pragma omp parallel for schedule(dynamic, 1) if (!c.serial)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            CostSpec spec = cfg.costs.front();
            spec.alpha = cfg.alphas[static_cast<std::size_t>(i)];
            AnnealConfig ac = cfg.anneal;
            ac.seed = derive_seed(cfg.anneal.seed, static_cast<std::uint64_t>(i));
            models[static_cast<std::size_t>(i)] = {spec.alpha, multi_restart(data, arch, spec, ac).best.model};
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    const fs::path out = c.out.empty() ? fs::path("plotdata.csv") : fs::path(c.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    emit_plot_data(models, data, out);
    std::cerr << "wrote " << data.test.size() << " rows to " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neural-network prediction intervals trained by simulated annealing"};
    app.require_subcommand(1);

    Common synth, train, sweep, bench, plot, show;
    add_common(app.add_subcommand("synth", "generate a synthetic series as CSV"), synth, "CSV path");
    add_common(app.add_subcommand("train", "train one network with multi-restart annealing"), train,
               "output directory for model.json, trace.jsonl, summary.json");
    add_common(app.add_subcommand("sweep", "hidden-size sweep for each configured cost"), sweep, "CSV path");
    add_common(app.add_subcommand("bench", "multi-trial statistics for every configured cost"), bench,
               "output directory for stats.csv, stats.jsonl, trials.jsonl");
    add_common(app.add_subcommand("plotdata", "test-split bounds for each configured alpha"), plot, "CSV path");
    add_common(app.add_subcommand("config", "print the resolved configuration"), show, "JSON path");

    CLI11_PARSE(app, argc, argv);
    try {
        const auto* cmd = app.get_subcommands().front();
        const std::string name = cmd->get_name();
        if (name == "synth") return run_synth(synth);
        if (name == "train") return run_train(train);
        if (name == "sweep") return run_sweep(sweep);
        if (name == "bench") return run_bench(bench);
        if (name == "plotdata") return run_plotdata(plot);
        emit(show, "config.json", load_config(show).to_json() + "\n");
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
