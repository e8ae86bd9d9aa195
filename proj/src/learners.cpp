#include "routeboost/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "routeboost/error.hpp"

namespace routeboost {

using nlohmann::json;

std::string to_string(LearnerKind kind) {
    switch (kind) {
        case LearnerKind::Mean: return "mean";
        case LearnerKind::Ridge: return "ridge";
        case LearnerKind::Tree: return "tree";
    }
    return "unknown";
}

LearnerKind learner_kind_from_string(const std::string& name) {
    if (name == "mean") return LearnerKind::Mean;
    if (name == "ridge") return LearnerKind::Ridge;
    if (name == "tree") return LearnerKind::Tree;
    throw Error(ErrorCode::InvalidArgument, "unknown learner kind '" + name + "'");
}

void LearnerConfig::validate() const {
    if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) {
        throw Error(ErrorCode::InvalidArgument, "ridge_lambda must be a finite non-negative number");
    }
    if (tree_max_depth < 1) throw Error(ErrorCode::InvalidArgument, "tree_max_depth must be >= 1");
    if (tree_min_leaf < 1) throw Error(ErrorCode::InvalidArgument, "tree_min_leaf must be >= 1");
}

std::size_t FittedLearner::depth() const {
    if (nodes.empty()) return 0;
    std::size_t deepest = 0;
    std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [idx, d] = stack.back();
        stack.pop_back();
        const auto& n = nodes[static_cast<std::size_t>(idx)];
        if (n.is_leaf()) {
            deepest = std::max(deepest, d);
        } else {
            stack.emplace_back(n.left, d + 1);
            stack.emplace_back(n.right, d + 1);
        }
    }
    return deepest;
}

namespace {

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

void fit_ridge(FittedLearner& model, const LearnerConfig& config, const Matrix& x, std::span<const double> y,
               Exec exec) {
    const std::size_t p = x.cols();
    const auto sys = kernels::centered_system(x, y, exec);

    Eigen::MatrixXd a(p, p);
    Eigen::VectorXd b(p);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) a(i, j) = sys.gram[i * p + j];
        a(i, i) += config.ridge_lambda;
        b(i) = sys.rhs[i];
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    // Rounding can leave a tiny positive pivot on an exactly rank-deficient
    // matrix; treat pivots at the noise level of their diagonal as zero.
    bool degenerate = false;
    for (std::size_t i = 0; i < p && llt.info() == Eigen::Success; ++i) {
        const double pivot = llt.matrixLLT()(i, i);
        degenerate = degenerate || pivot * pivot <= 16.0 * std::numeric_limits<double>::epsilon() * a(i, i);
    }
    if (llt.info() != Eigen::Success || degenerate) {
        throw Error(ErrorCode::SingularSystem, "normal equations are not positive definite (lambda = " +
                                                   std::to_string(config.ridge_lambda) + ")");
    }
    const Eigen::VectorXd w = llt.solve(b);
    model.weights.assign(w.data(), w.data() + p);
    double offset = 0.0;
    for (std::size_t i = 0; i < p; ++i) offset += model.weights[i] * sys.x_mean[i];
    model.intercept = sys.y_mean - offset;
}

struct TreeBuilder {
    const LearnerConfig& config;
    const Matrix& x;
    std::span<const double> y;
    Exec exec;
    std::vector<TreeNode>& nodes;

    int build(std::vector<std::size_t> rows, int depth) {
        TreeNode node;
        double sum = 0.0;
        for (auto r : rows) sum += y[r];
        node.value = sum / static_cast<double>(rows.size());
        node.count = rows.size();
        const int index = static_cast<int>(nodes.size());
        nodes.push_back(node);
        if (depth >= config.tree_max_depth || rows.size() < 2 * config.tree_min_leaf) return index;

        double sse = 0.0;
        for (auto r : rows) sse += (y[r] - node.value) * (y[r] - node.value);
        const auto split = kernels::best_split(x, y, rows, config.tree_min_leaf, exec);
        if (split.feature < 0 || !(split.gain > 1e-12 * sse)) return index;

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        const auto col = x.col(static_cast<std::size_t>(split.feature));
        for (auto r : rows) (col[r] <= split.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        const int l = build(std::move(left), depth + 1);
        const int rr = build(std::move(right), depth + 1);
        auto& n = nodes[static_cast<std::size_t>(index)];
        n.feature = split.feature;
        n.threshold = split.threshold;
        n.left = l;
        n.right = rr;
        return index;
    }
};

Matrix standardized(const Matrix& x, const FittedLearner& model) {
    Matrix out(x.rows(), x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        const auto src = x.col(c);
        auto dst = out.col(c);
        for (std::size_t r = 0; r < x.rows(); ++r) dst[r] = (src[r] - model.offset[c]) / model.scale[c];
    }
    return out;
}

}  // namespace

FittedLearner fit(const LearnerConfig& config, const Matrix& x, std::span<const double> y, SignalSet features,
                  Exec exec) {
    config.validate();
    if (x.rows() == 0 || y.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training rows");
    if (y.size() != x.rows()) throw Error(ErrorCode::ArityMismatch, "target length differs from row count");
    if (features.empty()) {
        for (std::size_t c = 0; c < x.cols(); ++c) features.push_back("x" + std::to_string(c));
    }
    if (features.size() != x.cols()) throw Error(ErrorCode::ArityMismatch, "feature names do not match columns");
    if (config.kind != LearnerKind::Mean && x.cols() == 0) {
        throw Error(ErrorCode::InvalidArgument, to_string(config.kind) + " learner needs at least one feature");
    }

    FittedLearner model;
    model.kind = config.kind;
    model.features = std::move(features);

    if (config.kind == LearnerKind::Mean) {
        model.constant = mean_of(y);
        return model;
    }

    const Matrix* design = &x;
    Matrix scaled;
    if (config.standardize) {
        model.offset.resize(x.cols());
        model.scale.resize(x.cols());
        for (std::size_t c = 0; c < x.cols(); ++c) {
            const auto col = x.col(c);
            const double m = mean_of(col);
            double ss = 0.0;
            for (double v : col) ss += (v - m) * (v - m);
            const double sd = std::sqrt(ss / static_cast<double>(col.size()));
            model.offset[c] = m;
            model.scale[c] = sd > 0.0 ? sd : 1.0;
        }
        scaled = standardized(x, model);
        design = &scaled;
    }

    if (config.kind == LearnerKind::Ridge) {
        fit_ridge(model, config, *design, y, exec);
    } else {
        std::vector<std::size_t> rows(x.rows());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        TreeBuilder{config, *design, y, exec, model.nodes}.build(std::move(rows), 0);
    }
    return model;
}

double predict_one(const FittedLearner& model, std::span<const double> x) {
    if (x.size() != model.features.size()) {
        throw Error(ErrorCode::ArityMismatch, "expected " + std::to_string(model.features.size()) +
                                                  " inputs, got " + std::to_string(x.size()));
    }
    auto input = [&](std::size_t i) {
        return model.offset.empty() ? x[i] : (x[i] - model.offset[i]) / model.scale[i];
    };
    switch (model.kind) {
        case LearnerKind::Mean:
            return model.constant;
        case LearnerKind::Ridge: {
            double out = model.intercept;
            for (std::size_t i = 0; i < model.weights.size(); ++i) out += model.weights[i] * input(i);
            return out;
        }
        case LearnerKind::Tree: {
            std::size_t idx = 0;
            while (!model.nodes[idx].is_leaf()) {
                const auto& n = model.nodes[idx];
                idx = static_cast<std::size_t>(input(static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left
                                                                                                         : n.right);
            }
            return model.nodes[idx].value;
        }
    }
    return 0.0;
}

namespace {

json node_to_json(const FittedLearner& model, int idx) {
    const auto& n = model.nodes[static_cast<std::size_t>(idx)];
    if (n.is_leaf()) return json{{"value", n.value}, {"n", n.count}};
    return json{{"feature", n.feature},
                {"threshold", n.threshold},
                {"value", n.value},
                {"n", n.count},
                {"left", node_to_json(model, n.left)},
                {"right", node_to_json(model, n.right)}};
}

int node_from_json(const json& j, std::vector<TreeNode>& nodes, std::size_t n_features) {
    TreeNode node;
    node.value = j.at("value").get<double>();
    node.count = j.at("n").get<std::size_t>();
    const int index = static_cast<int>(nodes.size());
    nodes.push_back(node);
    if (j.contains("feature")) {
        const int feature = j.at("feature").get<int>();
        if (feature < 0 || static_cast<std::size_t>(feature) >= n_features) {
            throw Error(ErrorCode::Config, "tree node references feature " + std::to_string(feature));
        }
        const double threshold = j.at("threshold").get<double>();
        const int l = node_from_json(j.at("left"), nodes, n_features);
        const int r = node_from_json(j.at("right"), nodes, n_features);
        auto& n = nodes[static_cast<std::size_t>(index)];
        n.feature = feature;
        n.threshold = threshold;
        n.left = l;
        n.right = r;
    }
    return index;
}

}  // namespace

json to_json(const FittedLearner& model) {
    json params;
    switch (model.kind) {
        case LearnerKind::Mean: params["constant"] = model.constant; break;
        case LearnerKind::Ridge:
            params["intercept"] = model.intercept;
            params["weights"] = model.weights;
            break;
        case LearnerKind::Tree: params["root"] = node_to_json(model, 0); break;
    }
    if (!model.offset.empty()) {
        params["standardize"] = json{{"offset", model.offset}, {"scale", model.scale}};
    }
    return json{{"kind", to_string(model.kind)}, {"features", model.features}, {"parameters", params}};
}

FittedLearner learner_from_json(const json& j) {
    try {
        FittedLearner model;
        model.kind = learner_kind_from_string(j.at("kind").get<std::string>());
        model.features = j.at("features").get<SignalSet>();
        const auto& params = j.at("parameters");
        switch (model.kind) {
            case LearnerKind::Mean: model.constant = params.at("constant").get<double>(); break;
            case LearnerKind::Ridge:
                model.intercept = params.at("intercept").get<double>();
                model.weights = params.at("weights").get<std::vector<double>>();
                if (model.weights.size() != model.features.size()) {
                    throw Error(ErrorCode::Config, "ridge weights do not match features");
                }
                break;
            case LearnerKind::Tree: node_from_json(params.at("root"), model.nodes, model.features.size()); break;
        }
        if (params.contains("standardize")) {
            model.offset = params["standardize"].at("offset").get<std::vector<double>>();
            model.scale = params["standardize"].at("scale").get<std::vector<double>>();
            if (model.offset.size() != model.features.size() || model.scale.size() != model.features.size()) {
                throw Error(ErrorCode::Config, "standardization does not match features");
            }
        }
        return model;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Config, std::string("invalid learner JSON: ") + e.what());
    }
}

json to_json(const LearnerConfig& config) {
    return json{{"kind", to_string(config.kind)},
                {"lambda", config.ridge_lambda},
                {"max_depth", config.tree_max_depth},
                {"min_leaf", config.tree_min_leaf},
                {"standardize", config.standardize}};
}

LearnerConfig learner_config_from_json(const json& j, LearnerConfig defaults) {
    try {
        if (j.contains("kind")) defaults.kind = learner_kind_from_string(j["kind"].get<std::string>());
        if (j.contains("lambda")) defaults.ridge_lambda = j["lambda"].get<double>();
        if (j.contains("max_depth")) defaults.tree_max_depth = j["max_depth"].get<int>();
        if (j.contains("min_leaf")) defaults.tree_min_leaf = j["min_leaf"].get<std::size_t>();
        if (j.contains("standardize")) defaults.standardize = j["standardize"].get<bool>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Config, std::string("invalid learner config: ") + e.what());
    }
    return defaults;
}

}  // namespace routeboost
