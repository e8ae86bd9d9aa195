#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "routeboost/protocol.hpp"
#include "routeboost/synthgen.hpp"

namespace routeboost {

struct CoalesceDirective {
    SignalId name;
    SignalSet sources;
};

/// Parses "B=B1,B2".
CoalesceDirective parse_coalesce(const std::string& text);

/// Everything a command needs. Loaded from one JSON document; command-line
/// flags are applied on top by the CLI.
struct RunConfig {
    std::optional<std::filesystem::path> data;
    std::optional<SignalId> target;
    SubsetOptions subsets;
    bool strategy_given = false;
    LearnerConfig learner;
    EnsembleMode mode = EnsembleMode::Boosting;
    std::uint64_t seed = 0;
    double test_fraction = 0.3;
    std::vector<CoalesceDirective> coalesce;
    std::optional<synth::PlantLayout> layout;
    std::size_t rows = 10000;

    std::optional<std::filesystem::path> model;
    std::optional<std::filesystem::path> report;
    std::optional<std::filesystem::path> manifest;
    std::optional<std::filesystem::path> output;
    std::optional<std::filesystem::path> table;
};

/// Throws Config for unknown keys or ill-typed values.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies the coalesce directives in order.
Dataset apply_coalesce(Dataset dataset, const std::vector<CoalesceDirective>& directives);

}  // namespace routeboost
