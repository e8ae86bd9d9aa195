// routeboost: route-aware ensemble regression for systematically missing
// sensor data.
//
// Exit codes: 0 success, 1 domain error, 2 I/O or configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "routeboost/availability.hpp"
#include "routeboost/ensemble.hpp"
#include "routeboost/error.hpp"
#include "routeboost/protocol.hpp"
#include "routeboost/run_config.hpp"
#include "routeboost/synthgen.hpp"

namespace rb = routeboost;
using nlohmann::json;

namespace {

// Command-line values; each one overrides the config file when given.
struct Flags {
    std::string config;
    std::string data;
    std::string target;
    std::vector<std::string> coalesce;
    std::string strategy;
    std::optional<bool> include_base_signals;
    std::optional<double> min_support;
    std::string uncommon_policy;
    std::string mode;
    std::string learner;
    std::optional<double> lambda;
    std::optional<int> max_depth;
    std::optional<std::size_t> min_leaf;
    bool standardize = false;
    std::optional<std::uint64_t> seed;
    std::optional<double> test_fraction;
    std::optional<std::size_t> rows;
    std::string model;
    std::string report;
    std::string manifest;
    std::string output;
    std::string table;
    std::string input;
    std::string layout;
    std::string layout_out;
    bool synthetic = false;
};

rb::RunConfig resolve(const Flags& f) {
    rb::RunConfig cfg = f.config.empty() ? rb::RunConfig{} : rb::load_run_config(f.config);
    if (!f.data.empty()) cfg.data = f.data;
    if (!f.target.empty()) cfg.target = f.target;
    if (!f.coalesce.empty()) {
        cfg.coalesce.clear();
        for (const auto& c : f.coalesce) cfg.coalesce.push_back(rb::parse_coalesce(c));
    }
    try {
        if (!f.strategy.empty()) {
            cfg.subsets.strategy = rb::strategy_from_string(f.strategy);
            cfg.strategy_given = true;
        }
        if (!f.uncommon_policy.empty()) cfg.subsets.uncommon_policy = rb::uncommon_policy_from_string(f.uncommon_policy);
        if (!f.mode.empty()) cfg.mode = rb::ensemble_mode_from_string(f.mode);
        if (!f.learner.empty()) cfg.learner.kind = rb::learner_kind_from_string(f.learner);
    } catch (const rb::Error& e) {
        throw rb::Error(rb::ErrorCode::Config, e.what());
    }
    if (f.include_base_signals) cfg.subsets.include_base_signals = *f.include_base_signals;
    if (f.min_support) cfg.subsets.min_support = *f.min_support;
    if (f.lambda) cfg.learner.ridge_lambda = *f.lambda;
    if (f.max_depth) cfg.learner.tree_max_depth = *f.max_depth;
    if (f.min_leaf) cfg.learner.tree_min_leaf = *f.min_leaf;
    if (f.standardize) cfg.learner.standardize = true;
    if (f.seed) cfg.seed = *f.seed;
    if (f.test_fraction) cfg.test_fraction = *f.test_fraction;
    if (f.rows) cfg.rows = *f.rows;
    if (!f.model.empty()) cfg.model = f.model;
    if (!f.report.empty()) cfg.report = f.report;
    if (!f.manifest.empty()) cfg.manifest = f.manifest;
    if (!f.output.empty()) cfg.output = f.output;
    if (!f.table.empty()) cfg.table = f.table;
    if (!f.layout.empty()) {
        std::ifstream in(f.layout);
        if (!in) throw rb::Error(rb::ErrorCode::Io, "cannot open layout '" + f.layout + "'");
        try {
            cfg.layout = rb::synth::layout_from_json(json::parse(in));
        } catch (const json::parse_error& e) {
            throw rb::Error(rb::ErrorCode::Config, e.what());
        }
    }
    // Segments given without a strategy imply the route strategy.
    if (!cfg.strategy_given && !cfg.subsets.segments.empty()) cfg.subsets.strategy = rb::Strategy::Routes;
    return cfg;
}

rb::Dataset load_data(const rb::RunConfig& cfg, bool need_target = true) {
    if (!cfg.data) throw rb::Error(rb::ErrorCode::Config, "no data file given (--data)");
    rb::Dataset data;
    if (cfg.target) {
        data = rb::load_dataset(*cfg.data, *cfg.target);
    } else if (need_target) {
        throw rb::Error(rb::ErrorCode::Config, "no target signal given (--target)");
    } else {
        data = rb::read_csv(*cfg.data);
    }
    return rb::apply_coalesce(std::move(data), cfg.coalesce);
}

void write_text(const std::optional<std::filesystem::path>& path, const std::string& text) {
    if (!path) return;
    std::ofstream out(*path, std::ios::binary);
    if (!out) throw rb::Error(rb::ErrorCode::Io, "cannot write '" + path->string() + "'");
    out << text;
}

void write_json(const std::optional<std::filesystem::path>& path, const json& j) {
    write_text(path, j.dump(2) + "\n");
}

std::string join(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

int cmd_analyze(const rb::RunConfig& cfg) {
    const auto data = load_data(cfg, false);
    const auto patterns = rb::pattern_summary(data);
    const auto inferred = rb::infer_signal_groups(data);
    const auto groups = cfg.subsets.groups.empty() ? inferred : cfg.subsets.groups;
    const auto always = rb::always_available_signals(data);
    const auto routes = rb::route_frequencies(data, groups);

    std::cout << "rows: " << data.n_rows() << ", signals: " << data.n_signals() << "\n\n";
    std::cout << "availability patterns (" << patterns.size() << "):\n";
    for (const auto& p : patterns) std::cout << "  " << p.count << "\t{" << join(p.present, ",") << "}\n";
    std::cout << "\ninferred signal groups (" << inferred.size() << "):\n";
    for (const auto& g : inferred) std::cout << "  " << g.name << "\t{" << join(g.members, ",") << "}\n";
    std::cout << "\nalways available: {" << join(always, ",") << "}\n";
    std::cout << "\nroute frequencies" << (cfg.subsets.groups.empty() ? " (inferred groups)" : " (configured groups)")
              << ":\n";
    for (const auto& r : routes) std::cout << "  " << r.count << "\t{" << join(r.groups_present, ",") << "}\n";

    json report{{"rows", data.n_rows()}, {"signals", data.signals()}, {"always_available", always}};
    report["patterns"] = json::array();
    for (const auto& p : patterns) report["patterns"].push_back({{"present", p.present}, {"count", p.count}});
    report["inferred_groups"] = json::array();
    for (const auto& g : inferred) report["inferred_groups"].push_back({{"name", g.name}, {"signals", g.members}});
    report["routes"] = json::array();
    for (const auto& r : routes) report["routes"].push_back({{"groups", r.groups_present}, {"count", r.count}});
    write_json(cfg.report, report);
    return 0;
}

int cmd_subset(const rb::RunConfig& cfg) {
    const auto data = load_data(cfg);
    const auto specs = rb::build_specs(data, cfg.subsets);
    const auto manifest = rb::subset_manifest(data, specs);
    for (const auto& m : manifest) {
        std::cout << m["name"].get<std::string>() << "\t" << m["rows"].get<std::size_t>() << " rows\t{"
                  << join(m["features"].get<std::vector<std::string>>(), ",") << "}\n";
    }
    write_json(cfg.manifest, json{{"strategy", rb::to_string(cfg.subsets.strategy)}, {"subsets", manifest}});
    return 0;
}

int cmd_train(const rb::RunConfig& cfg) {
    const auto data = load_data(cfg);
    if (!cfg.model) throw rb::Error(rb::ErrorCode::Config, "no model output path given (--model)");
    const auto specs = rb::build_specs(data, cfg.subsets);
    const auto model = rb::train_ensemble(data, specs, cfg.mode, cfg.learner);
    for (const auto& m : model.members) {
        std::cout << m.name << "\t" << m.train_rows << " rows\t{" << join(m.features, ",") << "}";
        if (m.parent >= 0) std::cout << "\tresidual of " << model.members[static_cast<std::size_t>(m.parent)].name;
        std::cout << "\n";
    }
    rb::save_model(model, *cfg.model);
    write_json(cfg.manifest, json{{"strategy", rb::to_string(cfg.subsets.strategy)},
                                  {"mode", rb::to_string(cfg.mode)},
                                  {"subsets", rb::subset_manifest(data, specs)}});
    return 0;
}

int cmd_predict(const rb::RunConfig& cfg, const std::string& input) {
    if (!cfg.model) throw rb::Error(rb::ErrorCode::Config, "no model given (--model)");
    if (input.empty()) throw rb::Error(rb::ErrorCode::Config, "no input rows given (--input)");
    const auto model = rb::load_model(*cfg.model);
    const auto rows = rb::apply_coalesce(rb::read_csv(input), cfg.coalesce);
    const auto predictions = rb::predict_rows(model, rows);

    std::string out = "row,prediction,members,reason\n";
    char buf[64];
    for (std::size_t r = 0; r < predictions.size(); ++r) {
        const auto& p = predictions[r];
        std::vector<std::string> names;
        for (auto k : p.members) names.push_back(model.members[k].name);
        out += std::to_string(r) + ",";
        if (p.value) {
            std::snprintf(buf, sizeof buf, "%.17g", *p.value);
            out += std::string(buf) + ",\"" + join(names, ",") + "\",\n";
        } else {
            out += ",,no-applicable-model\n";
        }
    }
    if (cfg.output) {
        write_text(cfg.output, out);
    } else {
        std::cout << out;
    }
    return 0;
}

int cmd_evaluate(const rb::RunConfig& cfg) {
    if (!cfg.model) throw rb::Error(rb::ErrorCode::Config, "no model given (--model)");
    const auto model = rb::load_model(*cfg.model);
    auto run = cfg;
    if (!run.target) run.target = model.target;
    const auto data = load_data(run);
    std::vector<rb::SubsetSpec> strata;
    for (const auto& m : model.members) strata.push_back({m.name, m.features});
    const auto metrics = rb::evaluate(model, data, strata);

    std::vector<std::string> names;
    for (const auto& s : strata) names.push_back(s.name);
    const std::vector<rb::MethodRow> rows{{"Model", metrics, ""}};
    const auto table = rb::render_table(rows, names);
    std::cout << table;
    std::cout << "overall: n=" << metrics.overall.n << "; skipped: missing target " << metrics.missing_target
              << ", unassigned " << metrics.unassigned << ", no applicable model " << metrics.no_applicable << "\n";
    write_json(cfg.report, rb::to_json(metrics));
    write_text(cfg.table, table);
    return 0;
}

int cmd_generate(const rb::RunConfig& cfg, const std::string& layout_out) {
    const auto layout = cfg.layout.value_or(rb::synth::default_layout());
    const auto data = rb::synth::generate({layout, cfg.rows, cfg.seed});
    if (cfg.output) {
        rb::write_csv(data, *cfg.output);
    } else {
        std::cout << rb::to_csv(data);
    }
    if (!layout_out.empty()) write_json(std::filesystem::path(layout_out), rb::synth::to_json(layout));
    return 0;
}

int cmd_benchmark(const rb::RunConfig& cfg, bool synthetic) {
    rb::Dataset data;
    rb::BenchmarkOptions options;
    options.subsets = cfg.subsets;
    if (synthetic) {
        const auto layout = cfg.layout.value_or(rb::synth::default_layout());
        data = rb::synth::generate({layout, cfg.rows, cfg.seed});
        if (!cfg.strategy_given && options.subsets.segments.empty()) {
            options.subsets.strategy = rb::Strategy::Routes;
            options.subsets.groups = rb::synth::layout_groups(layout);
            options.subsets.segments = rb::synth::layout_segments(layout);
        }
    } else {
        data = load_data(cfg);
    }
    options.learner = cfg.learner;
    options.mode = cfg.mode;
    options.seed = cfg.seed;
    options.test_fraction = cfg.test_fraction;

    const auto result = rb::run_benchmark(data, options);
    const auto table = result.table();
    std::cout << table;
    std::cout << "train rows: " << result.split.train.size() << ", test rows: " << result.split.test.size()
              << ", mode: " << rb::to_string(options.mode) << ", learner: " << rb::to_string(options.learner.kind)
              << "\n";
    write_json(cfg.report, result.to_json());
    write_text(cfg.table, table);
    return 0;
}

void add_data_options(CLI::App* cmd, Flags& f) {
    cmd->add_option("--data", f.data, "Input CSV");
    cmd->add_option("--target", f.target, "Target signal");
    cmd->add_option("--coalesce", f.coalesce, "Merge columns, e.g. B=B1,B2 (repeatable)");
}

void add_subset_options(CLI::App* cmd, Flags& f) {
    cmd->add_option("--strategy", f.strategy, "grouped | routes | auto");
    cmd->add_option("--include-base-signals", f.include_base_signals,
                    "Grouped strategy: add always-available signals to every group subset (true/false)");
    cmd->add_option("--min-support", f.min_support, "Auto routes: minimum row fraction of a route");
    cmd->add_option("--uncommon", f.uncommon_policy, "drop | merge_common");
}

void add_learner_options(CLI::App* cmd, Flags& f) {
    cmd->add_option("--mode", f.mode, "boosting | bagging");
    cmd->add_option("--learner", f.learner, "mean | ridge | tree");
    cmd->add_option("--lambda", f.lambda, "Ridge penalty");
    cmd->add_option("--max-depth", f.max_depth, "Tree depth limit");
    cmd->add_option("--min-leaf", f.min_leaf, "Minimum rows per tree leaf");
    cmd->add_flag("--standardize", f.standardize, "z-score member inputs");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Route-aware ensemble regression for data with systematically missing signals"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--config", f.config, "JSON run configuration; command-line flags win");

    auto* analyze = app.add_subcommand("analyze", "Summarize availability patterns, signal groups and routes");
    add_data_options(analyze, f);
    analyze->add_option("--report", f.report, "JSON report path");

    auto* subset = app.add_subcommand("subset", "Build missing-value-free subset specifications");
    add_data_options(subset, f);
    add_subset_options(subset, f);
    subset->add_option("--manifest", f.manifest, "JSON subset manifest path");

    auto* train = app.add_subcommand("train", "Train a boosting or bagging ensemble");
    add_data_options(train, f);
    add_subset_options(train, f);
    add_learner_options(train, f);
    train->add_option("--model", f.model, "Model JSON output path");
    train->add_option("--manifest", f.manifest, "JSON subset manifest path");

    auto* predict = app.add_subcommand("predict", "Predict with the applicable ensemble members");
    predict->add_option("--model", f.model, "Model JSON")->required();
    predict->add_option("--input", f.input, "CSV rows to predict")->required();
    predict->add_option("--output", f.output, "Predictions CSV (default: stdout)");
    predict->add_option("--coalesce", f.coalesce, "Merge columns, e.g. B=B1,B2 (repeatable)");

    auto* evaluate = app.add_subcommand("evaluate", "Stratified MAE / R2 of a model");
    add_data_options(evaluate, f);
    evaluate->add_option("--model", f.model, "Model JSON")->required();
    evaluate->add_option("--report", f.report, "JSON report path");
    evaluate->add_option("--table", f.table, "Plain-text table path");

    auto* generate = app.add_subcommand("generate", "Generate a synthetic plant dataset");
    generate->add_option("--rows", f.rows, "Number of rows");
    generate->add_option("--seed", f.seed, "Random seed (default 0)");
    generate->add_option("--layout", f.layout, "Layout JSON (default: built-in steel layout)");
    generate->add_option("--output", f.output, "CSV output path (default: stdout)");
    generate->add_option("--layout-out", f.layout_out, "Write the layout used as JSON");

    auto* bench = app.add_subcommand("benchmark", "Proposed ensemble vs complete-case model, per stratum");
    add_data_options(bench, f);
    add_subset_options(bench, f);
    add_learner_options(bench, f);
    bench->add_flag("--synthetic", f.synthetic, "Use the synthetic generator instead of --data");
    bench->add_option("--rows", f.rows, "Synthetic rows");
    bench->add_option("--layout", f.layout, "Synthetic layout JSON");
    bench->add_option("--seed", f.seed, "Seed for the split and the generator (default 0)");
    bench->add_option("--test-fraction", f.test_fraction, "Held-out fraction (default 0.3)");
    bench->add_option("--report", f.report, "JSON report path");
    bench->add_option("--table", f.table, "Plain-text table path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const auto cfg = resolve(f);
        if (analyze->parsed()) return cmd_analyze(cfg);
        if (subset->parsed()) return cmd_subset(cfg);
        if (train->parsed()) return cmd_train(cfg);
        if (predict->parsed()) return cmd_predict(cfg, f.input);
        if (evaluate->parsed()) return cmd_evaluate(cfg);
        if (generate->parsed()) return cmd_generate(cfg, f.layout_out);
        if (bench->parsed()) return cmd_benchmark(cfg, f.synthetic);
    } catch (const rb::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return rb::is_input_error(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
