#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "routeboost/availability.hpp"
#include "routeboost/ensemble.hpp"
#include "routeboost/subsetting.hpp"

namespace routeboost {

enum class Strategy { Grouped, Routes, Auto };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);
std::string to_string(UncommonPolicy p);
UncommonPolicy uncommon_policy_from_string(const std::string& name);

struct SubsetOptions {
    Strategy strategy = Strategy::Grouped;
    std::vector<SignalGroup> groups;  // empty: inferred from the data
    std::vector<RouteSegment> segments;
    bool include_base_signals = true;
    double min_support = 0.05;
    UncommonPolicy uncommon_policy = UncommonPolicy::Drop;
};

/// Configured groups win over inference.
std::vector<SignalGroup> resolve_groups(const Dataset& dataset, const SubsetOptions& options);

std::vector<SubsetSpec> build_specs(const Dataset& dataset, const SubsetOptions& options);

EnsembleModel train_ensemble(const Dataset& dataset, std::span<const SubsetSpec> specs, EnsembleMode mode,
                             const LearnerConfig& config, Exec exec = Exec::Parallel);

struct TrainTestSplit {
    std::vector<std::size_t> train;  // ascending
    std::vector<std::size_t> test;   // ascending
};

/// Seeded Fisher-Yates permutation; the first round(n * test_fraction) indices
/// form the test partition.
TrainTestSplit split_rows(std::size_t n_rows, double test_fraction, std::uint64_t seed);

/// FNV-1a over the row indices; identifies a training partition in reports.
std::uint64_t rows_digest(std::span<const std::size_t> rows);

struct BenchmarkOptions {
    SubsetOptions subsets;
    LearnerConfig learner;
    EnsembleMode mode = EnsembleMode::Boosting;
    double test_fraction = 0.3;
    std::uint64_t seed = 0;
};

struct BenchmarkResult {
    TrainTestSplit split;
    std::vector<SubsetSpec> specs;
    EnsembleModel proposed;
    StratifiedMetrics proposed_metrics;
    std::optional<EnsembleModel> conventional;
    std::optional<StratifiedMetrics> conventional_metrics;
    std::string conventional_note;  // set when the conventional arm could not be trained

    std::string table() const;
    nlohmann::json to_json() const;
};

/// Splits before subsetting so both arms see the same training rows; strata are
/// the proposed method's subset specs.
BenchmarkResult run_benchmark(const Dataset& dataset, const BenchmarkOptions& options);

/// Subset manifest entries: name, features, qualifying row count.
nlohmann::json subset_manifest(const Dataset& dataset, std::span<const SubsetSpec> specs);

}  // namespace routeboost
