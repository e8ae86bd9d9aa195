#include "routeboost/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "routeboost/error.hpp"
#include "routeboost/synthgen.hpp"

namespace routeboost {

using nlohmann::json;

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::Grouped: return "grouped";
        case Strategy::Routes: return "routes";
        case Strategy::Auto: return "auto";
    }
    return "unknown";
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "grouped") return Strategy::Grouped;
    if (name == "routes") return Strategy::Routes;
    if (name == "auto") return Strategy::Auto;
    throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + name + "'");
}

std::string to_string(UncommonPolicy p) { return p == UncommonPolicy::Drop ? "drop" : "merge_common"; }

UncommonPolicy uncommon_policy_from_string(const std::string& name) {
    if (name == "drop") return UncommonPolicy::Drop;
    if (name == "merge_common" || name == "merge") return UncommonPolicy::MergeCommon;
    throw Error(ErrorCode::InvalidArgument, "unknown uncommon policy '" + name + "'");
}

std::vector<SignalGroup> resolve_groups(const Dataset& dataset, const SubsetOptions& options) {
    if (!options.groups.empty()) {
        validate_groups(dataset, options.groups);
        return options.groups;
    }
    return infer_signal_groups(dataset);
}

std::vector<SubsetSpec> build_specs(const Dataset& dataset, const SubsetOptions& options) {
    const auto groups = resolve_groups(dataset, options);
    switch (options.strategy) {
        case Strategy::Grouped:
            return subsets_by_grouped_signals(dataset, groups, options.include_base_signals);
        case Strategy::Routes:
            if (options.segments.empty()) {
                throw Error(ErrorCode::Config, "strategy 'routes' needs segments (or use strategy 'auto')");
            }
            return subsets_by_common_routes(dataset, groups, options.segments, options.uncommon_policy);
        case Strategy::Auto:
            return subsets_by_common_routes(dataset, groups, AutoRouteOptions{options.min_support},
                                            options.uncommon_policy);
    }
    return {};
}

EnsembleModel train_ensemble(const Dataset& dataset, std::span<const SubsetSpec> specs, EnsembleMode mode,
                             const LearnerConfig& config, Exec exec) {
    return mode == EnsembleMode::Boosting ? train_boosting(dataset, specs, config, exec)
                                          : train_bagging(dataset, specs, config, exec);
}

TrainTestSplit split_rows(std::size_t n_rows, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "test fraction must lie in [0, 1)");
    }
    std::vector<std::size_t> perm(n_rows);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 engine(synth::splitmix64(seed));
    // unbiased bounded draw; std::uniform_int_distribution is implementation-defined
    auto bounded = [&](std::uint64_t range) {
        const std::uint64_t threshold = (0 - range) % range;
        while (true) {
            const std::uint64_t r = engine();
            if (r >= threshold) return r % range;
        }
    };
    for (std::size_t i = n_rows; i > 1; --i) {
        std::swap(perm[i - 1], perm[bounded(i)]);
    }
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n_rows) * test_fraction));
    TrainTestSplit split;
    split.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    std::sort(split.test.begin(), split.test.end());
    std::sort(split.train.begin(), split.train.end());
    return split;
}

std::uint64_t rows_digest(std::span<const std::size_t> rows) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto r : rows) {
        auto v = static_cast<std::uint64_t>(r);
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xFF;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

json subset_manifest(const Dataset& dataset, std::span<const SubsetSpec> specs) {
    json out = json::array();
    for (const auto& s : specs) {
        out.push_back({{"name", s.name}, {"features", s.features}, {"rows", subset_rows(dataset, s).size()}});
    }
    return out;
}

BenchmarkResult run_benchmark(const Dataset& dataset, const BenchmarkOptions& options) {
    BenchmarkResult result;
    result.split = split_rows(dataset.n_rows(), options.test_fraction, options.seed);
    const auto train = select_rows(dataset, result.split.train);
    const auto test = select_rows(dataset, result.split.test);

    result.specs = build_specs(train, options.subsets);
    result.proposed = train_ensemble(train, result.specs, options.mode, options.learner);
    result.proposed_metrics = evaluate(result.proposed, test, result.specs);

    try {
        result.conventional = train_conventional(train, options.learner);
        result.conventional_metrics = evaluate(*result.conventional, test, result.specs);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyTrainingSet) throw;
        result.conventional_note = "n/a (no complete cases)";
    }
    return result;
}

std::string BenchmarkResult::table() const {
    std::vector<std::string> strata;
    for (const auto& s : specs) strata.push_back(s.name);
    std::vector<MethodRow> rows;
    rows.push_back({"Proposed Method", proposed_metrics, ""});
    rows.push_back({"Conventional Model", conventional_metrics, conventional_note});
    return render_table(rows, strata);
}

json BenchmarkResult::to_json() const {
    const auto digest = rows_digest(split.train);
    json arms = json::object();
    json proposed_arm{{"metrics", routeboost::to_json(proposed_metrics)},
                      {"train_partition_digest", digest},
                      {"members", json::array()}};
    for (const auto& m : proposed.members) {
        proposed_arm["members"].push_back({{"name", m.name}, {"features", m.features}, {"train_rows", m.train_rows}});
    }
    arms["proposed"] = proposed_arm;
    if (conventional) {
        arms["conventional"] = {{"metrics", routeboost::to_json(*conventional_metrics)},
                                {"train_partition_digest", digest},
                                {"train_rows", conventional->members.front().train_rows}};
    } else {
        arms["conventional"] = {{"error", conventional_note}, {"train_partition_digest", digest}};
    }
    json spec_list = json::array();
    for (const auto& s : specs) spec_list.push_back({{"name", s.name}, {"features", s.features}});
    return json{{"split", {{"train", split.train.size()}, {"test", split.test.size()}, {"train_digest", digest}}},
                {"strata", spec_list},
                {"mode", routeboost::to_string(proposed.mode)},
                {"arms", arms}};
}

}  // namespace routeboost
