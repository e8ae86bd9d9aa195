#include "routeboost/run_config.hpp"

#include <fstream>
#include <set>

#include "routeboost/error.hpp"

namespace routeboost {

using nlohmann::json;

CoalesceDirective parse_coalesce(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
        throw Error(ErrorCode::Config, "coalesce directive must look like NAME=SRC1,SRC2: '" + text + "'");
    }
    CoalesceDirective d{text.substr(0, eq), {}};
    std::size_t start = eq + 1;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto part = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (part.empty()) throw Error(ErrorCode::Config, "empty source in coalesce directive '" + text + "'");
        d.sources.push_back(part);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return d;
}

RunConfig run_config_from_json(const json& j) {
    static const std::set<std::string> known{
        "data",   "target", "groups", "segments", "strategy", "include_base_signals", "min_support",
        "uncommon_policy", "learner", "mode", "seed", "test_fraction", "coalesce", "layout",
        "rows",   "model",  "report", "manifest", "output", "table"};
    if (!j.is_object()) throw Error(ErrorCode::Config, "config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw Error(ErrorCode::Config, "unknown config key '" + key + "'");
    }

    RunConfig cfg;
    try {
        auto path = [&](const char* key) -> std::optional<std::filesystem::path> {
            if (!j.contains(key)) return std::nullopt;
            return std::filesystem::path(j[key].get<std::string>());
        };
        cfg.data = path("data");
        cfg.model = path("model");
        cfg.report = path("report");
        cfg.manifest = path("manifest");
        cfg.output = path("output");
        cfg.table = path("table");
        if (j.contains("target")) cfg.target = j["target"].get<std::string>();
        if (j.contains("groups")) {
            for (const auto& g : j["groups"]) {
                cfg.subsets.groups.push_back({g.at("name").get<std::string>(), g.at("signals").get<SignalSet>()});
            }
        }
        if (j.contains("segments")) {
            for (const auto& s : j["segments"]) {
                cfg.subsets.segments.push_back(
                    {s.at("name").get<std::string>(), s.at("groups").get<std::vector<std::string>>()});
            }
        }
        if (j.contains("strategy")) {
            cfg.subsets.strategy = strategy_from_string(j["strategy"].get<std::string>());
            cfg.strategy_given = true;
        }
        cfg.subsets.include_base_signals = j.value("include_base_signals", cfg.subsets.include_base_signals);
        cfg.subsets.min_support = j.value("min_support", cfg.subsets.min_support);
        if (j.contains("uncommon_policy")) {
            cfg.subsets.uncommon_policy = uncommon_policy_from_string(j["uncommon_policy"].get<std::string>());
        }
        if (j.contains("learner")) cfg.learner = learner_config_from_json(j["learner"]);
        if (j.contains("mode")) cfg.mode = ensemble_mode_from_string(j["mode"].get<std::string>());
        cfg.seed = j.value("seed", cfg.seed);
        cfg.test_fraction = j.value("test_fraction", cfg.test_fraction);
        cfg.rows = j.value("rows", cfg.rows);
        if (j.contains("coalesce")) {
            for (const auto& c : j["coalesce"]) {
                cfg.coalesce.push_back({c.at("name").get<std::string>(), c.at("sources").get<SignalSet>()});
            }
        }
        if (j.contains("layout")) cfg.layout = synth::layout_from_json(j["layout"]);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Config, std::string("invalid config: ") + e.what());
    } catch (const Error& e) {
        if (is_input_error(e.code())) throw;
        throw Error(ErrorCode::Config, e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path.string() + "'");
    try {
        return run_config_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Config, "'" + path.string() + "': " + e.what());
    }
}

Dataset apply_coalesce(Dataset dataset, const std::vector<CoalesceDirective>& directives) {
    for (const auto& d : directives) dataset = coalesce(dataset, d.name, d.sources);
    return dataset;
}

}  // namespace routeboost
