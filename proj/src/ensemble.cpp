#include "routeboost/ensemble.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <sstream>

#include <omp.h>

#include "routeboost/error.hpp"

namespace routeboost {

using nlohmann::json;

std::string to_string(EnsembleMode mode) { return mode == EnsembleMode::Boosting ? "boosting" : "bagging"; }

EnsembleMode ensemble_mode_from_string(const std::string& name) {
    if (name == "boosting") return EnsembleMode::Boosting;
    if (name == "bagging") return EnsembleMode::Bagging;
    throw Error(ErrorCode::InvalidArgument, "unknown ensemble mode '" + name + "'");
}

namespace {

Matrix design_matrix(const Dataset& dataset, const SignalSet& features, std::span<const std::size_t> rows) {
    Matrix x(rows.size(), features.size());
    for (std::size_t c = 0; c < features.size(); ++c) {
        const auto& col = dataset.column(features[c]);
        auto dst = x.col(c);
        for (std::size_t i = 0; i < rows.size(); ++i) dst[i] = col.values[rows[i]];
    }
    return x;
}

std::vector<double> target_values(const Dataset& dataset, std::span<const std::size_t> rows) {
    const auto& col = dataset.column(dataset.target_index());
    std::vector<double> y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) y[i] = col.values[rows[i]];
    return y;
}

// Specs with features in dataset column order; the target may not be a feature.
std::vector<SubsetSpec> canonical_specs(const Dataset& dataset, std::span<const SubsetSpec> specs) {
    std::vector<SubsetSpec> out;
    for (const auto& s : specs) {
        if (s.features.empty()) throw Error(ErrorCode::InvalidArgument, "subset '" + s.name + "' has no features");
        if (std::find(s.features.begin(), s.features.end(), dataset.target()) != s.features.end()) {
            throw Error(ErrorCode::InvalidArgument, "subset '" + s.name + "' lists the target as a feature");
        }
        out.push_back({s.name, dataset.canonical_order(s.features)});
    }
    return out;
}

std::vector<std::size_t> training_rows(const Dataset& dataset, const SubsetSpec& spec) {
    auto rows = subset_rows(dataset, spec);
    if (rows.empty()) throw Error(ErrorCode::EmptySubset, "subset '" + spec.name + "' has no qualifying rows");
    return rows;
}

// Row-bound view of one member's inputs.
struct BoundMember {
    std::vector<const Column*> columns;

    bool applicable(std::size_t row) const {
        return std::all_of(columns.begin(), columns.end(), [row](const Column* c) { return c->present[row] != 0; });
    }
    double evaluate(const FittedLearner& learner, std::size_t row, std::vector<double>& scratch) const {
        scratch.resize(columns.size());
        for (std::size_t i = 0; i < columns.size(); ++i) scratch[i] = columns[i]->values[row];
        return predict_one(learner, scratch);
    }
};

std::vector<BoundMember> bind(const EnsembleModel& model, const Dataset& dataset, bool require_all) {
    std::vector<BoundMember> out;
    for (const auto& m : model.members) {
        BoundMember b;
        bool ok = true;
        for (const auto& f : m.features) {
            const auto idx = dataset.index_of(f);
            if (!idx) {
                if (require_all) throw Error(ErrorCode::UnknownSignal, f);
                ok = false;
                break;
            }
            b.columns.push_back(&dataset.column(*idx));
        }
        if (!ok) b.columns.clear();
        out.push_back(std::move(b));
    }
    return out;
}

double combine(EnsembleMode mode, std::vector<double>& outputs) {
    if (mode == EnsembleMode::Boosting) {
        double sum = 0.0;
        for (double v : outputs) sum += v;
        return sum;
    }
    // sorted so the mean does not depend on member order
    std::sort(outputs.begin(), outputs.end());
    double sum = 0.0;
    for (double v : outputs) sum += v;
    return sum / static_cast<double>(outputs.size());
}

RowPrediction predict_bound(const EnsembleModel& model, const std::vector<BoundMember>& bound,
                            const std::vector<bool>& resolvable, std::size_t row, std::vector<double>& scratch) {
    RowPrediction out;
    std::vector<double> outputs;
    for (std::size_t k = 0; k < model.members.size(); ++k) {
        if (!resolvable[k] || !bound[k].applicable(row)) continue;
        out.members.push_back(k);
        outputs.push_back(bound[k].evaluate(model.members[k].learner, row, scratch));
    }
    if (!out.members.empty()) out.value = combine(model.mode, outputs);
    return out;
}

}  // namespace

std::vector<std::size_t> member_path(const EnsembleModel& model, std::size_t k) {
    std::vector<std::size_t> path;
    for (int cur = static_cast<int>(k); cur >= 0; cur = model.members.at(static_cast<std::size_t>(cur)).parent) {
        path.push_back(static_cast<std::size_t>(cur));
    }
    std::reverse(path.begin(), path.end());
    return path;
}

EnsembleModel train_boosting(const Dataset& dataset, std::span<const SubsetSpec> specs, const LearnerConfig& config,
                             Exec exec) {
    const auto topo = nesting_topology(canonical_specs(dataset, specs));
    EnsembleModel model;
    model.mode = EnsembleMode::Boosting;
    model.target = dataset.target();

    for (std::size_t k = 0; k < topo.specs.size(); ++k) {
        const auto& spec = topo.specs[k];
        const auto rows = training_rows(dataset, spec);
        const auto x = design_matrix(dataset, spec.features, rows);
        auto y = target_values(dataset, rows);

        Member member{spec.name, spec.features, topo.parent[k], {}, rows.size()};
        if (member.parent >= 0) {
            // residual target: y minus the ancestors' summed predictions
            const auto ancestors = member_path(model, static_cast<std::size_t>(member.parent));
            std::vector<Matrix> inputs;
            for (auto a : ancestors) inputs.push_back(design_matrix(dataset, model.members[a].features, rows));
            const auto n = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel if (exec == Exec::Parallel && n > 1024)
            {
                std::vector<double> scratch;
#pragma omp for schedule(static)
                for (std::ptrdiff_t i = 0; i < n; ++i) {
                    const auto r = static_cast<std::size_t>(i);
                    double prefix = 0.0;
                    for (std::size_t a = 0; a < ancestors.size(); ++a) {
                        const auto& in = inputs[a];
                        scratch.resize(in.cols());
                        for (std::size_t c = 0; c < in.cols(); ++c) scratch[c] = in(r, c);
                        prefix += predict_one(model.members[ancestors[a]].learner, scratch);
                    }
                    y[r] = y[r] - prefix;
                }
            }
        }
        member.learner = fit(config, x, y, spec.features, exec);
        model.members.push_back(std::move(member));
    }
    return model;
}

EnsembleModel train_bagging(const Dataset& dataset, std::span<const SubsetSpec> specs, const LearnerConfig& config,
                            Exec exec) {
    const auto canon = canonical_specs(dataset, specs);
    if (canon.empty()) throw Error(ErrorCode::InvalidArgument, "at least one subset spec is required");
    EnsembleModel model;
    model.mode = EnsembleMode::Bagging;
    model.target = dataset.target();
    model.members.resize(canon.size());

    std::vector<std::exception_ptr> errors(canon.size());
    const auto count = static_cast<std::ptrdiff_t>(canon.size());
    const Exec inner = exec == Exec::Parallel && count > 1 ? Exec::Serial : exec;
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::Parallel && count > 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            const auto rows = training_rows(dataset, canon[k]);
            const auto x = design_matrix(dataset, canon[k].features, rows);
            const auto y = target_values(dataset, rows);
            model.members[k] = Member{canon[k].name, canon[k].features, -1,
                                      fit(config, x, y, canon[k].features, inner), rows.size()};
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return model;
}

EnsembleModel train_conventional(const Dataset& dataset, const LearnerConfig& config, Exec exec) {
    const auto features = dataset.feature_signals();
    if (features.empty()) throw Error(ErrorCode::InvalidArgument, "dataset has no non-target signals");
    const SubsetSpec all{"conventional", features};
    const auto rows = subset_rows(dataset, all);
    if (rows.empty()) {
        throw Error(ErrorCode::EmptyTrainingSet, "no complete cases: every row has at least one missing signal");
    }
    EnsembleModel model;
    model.mode = EnsembleMode::Boosting;
    model.target = dataset.target();
    const auto x = design_matrix(dataset, features, rows);
    const auto y = target_values(dataset, rows);
    model.members.push_back(Member{all.name, features, -1, fit(config, x, y, features, exec), rows.size()});
    return model;
}

std::vector<std::size_t> applicable_members(const EnsembleModel& model, std::span<const SignalId> row_signals) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < model.members.size(); ++k) {
        if (is_subset_of(model.members[k].features, row_signals)) out.push_back(k);
    }
    return out;
}

double predict(const EnsembleModel& model, const PartialRow& row) {
    SignalSet present;
    for (const auto& [name, value] : row) present.push_back(name);
    const auto members = applicable_members(model, present);
    if (members.empty()) throw Error(ErrorCode::NoApplicableModel, "no member has all of its inputs available");
    std::vector<double> outputs;
    std::vector<double> input;
    for (auto k : members) {
        const auto& m = model.members[k];
        input.clear();
        for (const auto& f : m.features) input.push_back(row.at(f));
        outputs.push_back(predict_one(m.learner, input));
    }
    return combine(model.mode, outputs);
}

std::vector<RowPrediction> predict_rows(const EnsembleModel& model, const Dataset& dataset, Exec exec) {
    const auto bound = bind(model, dataset, false);
    std::vector<bool> resolvable(model.members.size());
    for (std::size_t k = 0; k < bound.size(); ++k) {
        resolvable[k] = bound[k].columns.size() == model.members[k].features.size();
    }
    std::vector<RowPrediction> out(dataset.n_rows());
    const auto n = static_cast<std::ptrdiff_t>(dataset.n_rows());
    if (exec == Exec::Serial) {
        std::vector<double> scratch;
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] = predict_bound(model, bound, resolvable, static_cast<std::size_t>(i), scratch);
        }
        return out;
    }
#pragma omp parallel if (n > 512)
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] = predict_bound(model, bound, resolvable, static_cast<std::size_t>(i), scratch);
        }
    }
    return out;
}

StratifiedMetrics evaluate(const EnsembleModel& model, const Dataset& dataset, std::span<const SubsetSpec> strata,
                           Exec exec) {
    StratifiedMetrics result;
    const auto& target = dataset.column(model.target);

    // most specific first; stable among equal sizes
    std::vector<std::size_t> order(strata.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        return strata[a].features.size() > strata[b].features.size();
    });
    std::vector<std::vector<const Column*>> strata_cols(strata.size());
    for (std::size_t s = 0; s < strata.size(); ++s) {
        for (const auto& f : strata[s].features) strata_cols[s].push_back(&dataset.column(f));
    }

    const auto predictions = predict_rows(model, dataset, exec);
    std::vector<std::vector<double>> ys(strata.size()), yhats(strata.size());
    std::vector<double> all_y, all_hat;
    result.strata.resize(strata.size());
    for (std::size_t s = 0; s < strata.size(); ++s) result.strata[s].name = strata[s].name;

    for (std::size_t r = 0; r < dataset.n_rows(); ++r) {
        if (!target.present[r]) {
            ++result.missing_target;
            continue;
        }
        std::optional<std::size_t> stratum;
        for (auto s : order) {
            const auto& cols = strata_cols[s];
            if (std::all_of(cols.begin(), cols.end(), [r](const Column* c) { return c->present[r] != 0; })) {
                stratum = s;
                break;
            }
        }
        if (!strata.empty() && !stratum) {
            ++result.unassigned;
            continue;
        }
        const auto& pred = predictions[r];
        if (!pred.value) {
            ++result.no_applicable;
            if (stratum) ++result.strata[*stratum].no_applicable;
            continue;
        }
        if (stratum) {
            ys[*stratum].push_back(target.values[r]);
            yhats[*stratum].push_back(*pred.value);
        }
        all_y.push_back(target.values[r]);
        all_hat.push_back(*pred.value);
    }
    for (std::size_t s = 0; s < strata.size(); ++s) result.strata[s].metrics = summarize(ys[s], yhats[s]);
    result.overall = summarize(all_y, all_hat);
    return result;
}

json to_json(const EnsembleModel& model) {
    json members = json::array();
    for (const auto& m : model.members) {
        members.push_back(json{{"name", m.name},
                               {"features", m.features},
                               {"parent", m.parent},
                               {"train_rows", m.train_rows},
                               {"learner", to_json(m.learner)}});
    }
    return json{{"mode", to_string(model.mode)}, {"target", model.target}, {"members", members}};
}

EnsembleModel ensemble_from_json(const json& j) {
    try {
        EnsembleModel model;
        model.mode = ensemble_mode_from_string(j.at("mode").get<std::string>());
        model.target = j.at("target").get<std::string>();
        for (const auto& m : j.at("members")) {
            Member member;
            member.name = m.at("name").get<std::string>();
            member.features = m.at("features").get<SignalSet>();
            member.parent = m.value("parent", model.members.empty() ? -1 : static_cast<int>(model.members.size()) - 1);
            if (model.mode == EnsembleMode::Bagging) member.parent = -1;
            member.train_rows = m.value("train_rows", std::size_t{0});
            member.learner = learner_from_json(m.at("learner"));
            if (member.learner.features != member.features) {
                throw Error(ErrorCode::Config, "member '" + member.name + "' learner features differ from its features");
            }
            if (member.parent >= static_cast<int>(model.members.size())) {
                throw Error(ErrorCode::Config, "member '" + member.name + "' references a later parent");
            }
            model.members.push_back(std::move(member));
        }
        if (model.members.empty()) throw Error(ErrorCode::Config, "model has no members");
        return model;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Config, std::string("invalid model JSON: ") + e.what());
    }
}

void save_model(const EnsembleModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    out << to_json(model).dump(2) << '\n';
}

EnsembleModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    try {
        return ensemble_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Config, "'" + path.string() + "': " + e.what());
    }
}

}  // namespace routeboost
