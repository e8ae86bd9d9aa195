#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "routeboost/dataset.hpp"
#include "routeboost/kernels.hpp"
#include "routeboost/learners.hpp"
#include "routeboost/metrics.hpp"
#include "routeboost/subsetting.hpp"

namespace routeboost {

enum class EnsembleMode { Boosting, Bagging };

std::string to_string(EnsembleMode mode);
EnsembleMode ensemble_mode_from_string(const std::string& name);

struct Member {
    std::string name;
    SignalSet features;  // dataset column order; equals learner.features
    int parent = -1;     // boosting: member whose residual this one fits
    FittedLearner learner;
    std::size_t train_rows = 0;

    bool operator==(const Member&) const = default;
};

/// Boosting members are ordered so every parent precedes its children; member 0
/// is the base model and each child's features strictly contain its parent's.
/// A linear chain has parent[k] == k - 1.
struct EnsembleModel {
    EnsembleMode mode = EnsembleMode::Boosting;
    SignalId target;
    std::vector<Member> members;

    bool operator==(const EnsembleModel&) const = default;
};

/// Partial row: signals absent from the map are missing.
using PartialRow = std::map<SignalId, double>;

/// Sequential residual fitting over nested subsets. Member k is fit on its own
/// subset rows against y minus the summed predictions of its ancestors.
/// Throws NotNested, DuplicateFeatureSet, EmptySubset, EmptyTrainingSet.
EnsembleModel train_boosting(const Dataset& dataset, std::span<const SubsetSpec> specs, const LearnerConfig& config,
                             Exec exec = Exec::Parallel);

/// Independent direct-target members. Throws EmptySubset, EmptyTrainingSet.
EnsembleModel train_bagging(const Dataset& dataset, std::span<const SubsetSpec> specs, const LearnerConfig& config,
                            Exec exec = Exec::Parallel);

/// Listwise deletion: one member on all non-target signals over the rows where
/// every signal is present. Throws EmptyTrainingSet.
EnsembleModel train_conventional(const Dataset& dataset, const LearnerConfig& config, Exec exec = Exec::Parallel);

/// Members whose every feature appears in `row_signals`, ascending.
std::vector<std::size_t> applicable_members(const EnsembleModel& model, std::span<const SignalId> row_signals);

/// Boosting: sum of applicable members' outputs in member order. Bagging:
/// their arithmetic mean. Throws NoApplicableModel.
double predict(const EnsembleModel& model, const PartialRow& row);

struct RowPrediction {
    std::optional<double> value;  // empty: no applicable member
    std::vector<std::size_t> members;
};

/// Batch prediction over every row of `dataset` (target ignored).
std::vector<RowPrediction> predict_rows(const EnsembleModel& model, const Dataset& dataset,
                                        Exec exec = Exec::Parallel);

/// Ancestors of member `k` root first, `k` included.
std::vector<std::size_t> member_path(const EnsembleModel& model, std::size_t k);

/// Each row with a present target is assigned to the most specific stratum it
/// matches (largest feature set first) and scored there.
StratifiedMetrics evaluate(const EnsembleModel& model, const Dataset& dataset, std::span<const SubsetSpec> strata,
                           Exec exec = Exec::Parallel);

nlohmann::json to_json(const EnsembleModel& model);
EnsembleModel ensemble_from_json(const nlohmann::json& j);

void save_model(const EnsembleModel& model, const std::filesystem::path& path);
EnsembleModel load_model(const std::filesystem::path& path);

}  // namespace routeboost
