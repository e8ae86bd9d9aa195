#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "routeboost/dataset.hpp"
#include "routeboost/kernels.hpp"

namespace routeboost {

enum class LearnerKind { Mean, Ridge, Tree };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

struct LearnerConfig {
    LearnerKind kind = LearnerKind::Ridge;
    double ridge_lambda = 1e-8;
    int tree_max_depth = 4;
    std::size_t tree_min_leaf = 5;
    bool standardize = false;  // z-score inputs, applied again at predict time

    /// Throws InvalidArgument.
    void validate() const;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf mean
    std::size_t count = 0;

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct FittedLearner {
    LearnerKind kind = LearnerKind::Mean;
    SignalSet features;

    // Input standardization; empty when disabled.
    std::vector<double> offset;
    std::vector<double> scale;

    double constant = 0.0;  // mean

    double intercept = 0.0;  // ridge
    std::vector<double> weights;

    std::vector<TreeNode> nodes;  // tree, root at index 0

    std::size_t depth() const;
    bool operator==(const FittedLearner&) const = default;
};

/// Fits one member on a complete design matrix. `features` names the columns
/// (defaults to x0, x1, ...). Throws EmptyTrainingSet, SingularSystem,
/// ArityMismatch, InvalidArgument.
FittedLearner fit(const LearnerConfig& config, const Matrix& x, std::span<const double> y,
                  SignalSet features = {}, Exec exec = Exec::Parallel);

/// Throws ArityMismatch.
double predict_one(const FittedLearner& model, std::span<const double> x);

nlohmann::json to_json(const FittedLearner& model);
FittedLearner learner_from_json(const nlohmann::json& j);

nlohmann::json to_json(const LearnerConfig& config);
LearnerConfig learner_config_from_json(const nlohmann::json& j, LearnerConfig defaults = {});

}  // namespace routeboost
