#include "routeboost/subsetting.hpp"

#include <algorithm>
#include <set>

#include "routeboost/error.hpp"

namespace routeboost {

namespace {

// Groups with the target removed; groups left empty disappear.
std::vector<SignalGroup> strip_target(const Dataset& dataset, std::span<const SignalGroup> groups) {
    std::vector<SignalGroup> out;
    for (const auto& g : groups) {
        SignalGroup s{g.name, {}};
        for (const auto& m : g.members) {
            if (!dataset.has_target() || m != dataset.target()) s.members.push_back(m);
        }
        if (!s.members.empty()) out.push_back(std::move(s));
    }
    return out;
}

SignalSet union_of(const Dataset& dataset, const std::vector<const SignalGroup*>& groups) {
    SignalSet names;
    for (const auto* g : groups) names.insert(names.end(), g->members.begin(), g->members.end());
    return dataset.canonical_order(names);
}

// Intersection of present non-target signals over `rows`.
SignalSet common_signals(const Dataset& dataset, std::span<const std::size_t> rows) {
    SignalSet out;
    if (rows.empty()) return out;
    for (const auto& col : dataset.columns()) {
        if (dataset.has_target() && col.name == dataset.target()) continue;
        if (std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return col.present[r] != 0; })) {
            out.push_back(col.name);
        }
    }
    return out;
}

void append_uncommon(const Dataset& dataset, std::vector<SubsetSpec>& specs, UncommonPolicy policy) {
    if (policy != UncommonPolicy::MergeCommon) return;
    const auto rest = uncovered_rows(dataset, specs);
    auto common = common_signals(dataset, rest);
    if (common.empty()) return;
    const bool duplicate =
        std::any_of(specs.begin(), specs.end(), [&](const SubsetSpec& s) { return s.features == common; });
    if (!duplicate) specs.push_back({"uncommon", std::move(common)});
}

}  // namespace

bool is_subset_of(std::span<const SignalId> sub, std::span<const SignalId> super) {
    return std::all_of(sub.begin(), sub.end(),
                       [&](const SignalId& s) { return std::find(super.begin(), super.end(), s) != super.end(); });
}

std::vector<SubsetSpec> subsets_by_grouped_signals(const Dataset& dataset, std::span<const SignalGroup> groups,
                                                   bool include_base_signals) {
    validate_groups(dataset, groups);
    SignalSet base;
    for (const auto& s : always_available_signals(dataset)) {
        if (!dataset.has_target() || s != dataset.target()) base.push_back(s);
    }
    if (base.empty()) throw Error(ErrorCode::NoBaseSignals, "no non-target signal is present in every row");

    std::vector<SubsetSpec> specs{{"base", base}};
    const auto all_groups = complete_groups(dataset, groups);
    for (const auto& g : strip_target(dataset, all_groups)) {
        if (is_subset_of(g.members, base)) continue;
        SignalSet features = g.members;
        if (include_base_signals) features.insert(features.end(), base.begin(), base.end());
        specs.push_back({"r" + std::to_string(specs.size()), dataset.canonical_order(features)});
    }
    return specs;
}

std::vector<SubsetSpec> subsets_by_common_routes(const Dataset& dataset, std::span<const SignalGroup> groups,
                                                 std::span<const RouteSegment> segments, UncommonPolicy policy) {
    validate_groups(dataset, groups);
    const auto stripped = strip_target(dataset, groups);
    std::vector<SubsetSpec> specs;
    for (const auto& seg : segments) {
        if (seg.groups.empty()) throw Error(ErrorCode::EmptySegment, seg.name);
        std::vector<const SignalGroup*> members;
        std::set<std::string> seen;
        for (const auto& gname : seg.groups) {
            const auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.name == gname; });
            if (it == groups.end()) throw Error(ErrorCode::UnknownGroup, gname + " (segment '" + seg.name + "')");
            if (!seen.insert(gname).second) {
                throw Error(ErrorCode::InvalidArgument, "segment '" + seg.name + "' lists '" + gname + "' twice");
            }
            const auto st = std::find_if(stripped.begin(), stripped.end(), [&](const auto& g) { return g.name == gname; });
            if (st != stripped.end()) members.push_back(&*st);
        }
        auto features = union_of(dataset, members);
        if (features.empty()) throw Error(ErrorCode::EmptySegment, seg.name + " has no non-target signals");
        specs.push_back({seg.name, std::move(features)});
    }
    append_uncommon(dataset, specs, policy);
    if (specs.empty()) throw Error(ErrorCode::NoQualifyingRoutes, "no segments given");
    return specs;
}

std::vector<SubsetSpec> subsets_by_common_routes(const Dataset& dataset, std::span<const SignalGroup> groups,
                                                 const AutoRouteOptions& options, UncommonPolicy policy) {
    if (!(options.min_support > 0.0 && options.min_support <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "min_support must lie in (0, 1]");
    }
    validate_groups(dataset, groups);
    const auto stripped = strip_target(dataset, groups);
    const auto routes = route_frequencies(dataset, stripped);
    const double n = static_cast<double>(dataset.n_rows());

    std::vector<SubsetSpec> specs;
    for (const auto& route : routes) {
        if (route.groups_present.empty()) continue;
        if (static_cast<double>(route.count) < options.min_support * n) continue;
        std::vector<const SignalGroup*> members;
        for (const auto& gname : route.groups_present) {
            members.push_back(&*std::find_if(stripped.begin(), stripped.end(),
                                             [&](const auto& g) { return g.name == gname; }));
        }
        auto sorted_names = route.groups_present;
        std::sort(sorted_names.begin(), sorted_names.end());
        std::string name;
        for (const auto& g : sorted_names) name += (name.empty() ? "" : "+") + g;
        specs.push_back({name, union_of(dataset, members)});
    }
    append_uncommon(dataset, specs, policy);
    if (specs.empty()) {
        throw Error(ErrorCode::NoQualifyingRoutes,
                    "no route reaches min_support " + std::to_string(options.min_support));
    }
    return specs;
}

bool row_qualifies(const Dataset& dataset, const SubsetSpec& spec, std::size_t row) {
    if (dataset.has_target() && !dataset.column(dataset.target_index()).present[row]) return false;
    return std::all_of(spec.features.begin(), spec.features.end(),
                       [&](const SignalId& f) { return dataset.column(f).present[row] != 0; });
}

std::vector<std::size_t> subset_rows(const Dataset& dataset, const SubsetSpec& spec) {
    std::vector<const Column*> cols;
    for (const auto& f : spec.features) cols.push_back(&dataset.column(f));
    if (dataset.has_target()) cols.push_back(&dataset.column(dataset.target_index()));
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < dataset.n_rows(); ++r) {
        if (std::all_of(cols.begin(), cols.end(), [r](const Column* c) { return c->present[r] != 0; })) {
            rows.push_back(r);
        }
    }
    return rows;
}

std::vector<std::size_t> uncovered_rows(const Dataset& dataset, std::span<const SubsetSpec> specs) {
    std::vector<unsigned char> covered(dataset.n_rows(), 0);
    for (const auto& s : specs) {
        for (auto r : subset_rows(dataset, s)) covered[r] = 1;
    }
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < covered.size(); ++r) {
        if (!covered[r]) out.push_back(r);
    }
    return out;
}

Dataset materialize(const Dataset& dataset, const SubsetSpec& spec) {
    const auto rows = subset_rows(dataset, spec);
    if (rows.empty()) throw Error(ErrorCode::EmptySubset, "subset '" + spec.name + "' has no qualifying rows");
    SignalSet keep = spec.features;
    if (dataset.has_target()) keep.push_back(dataset.target());
    return project(dataset, keep, rows);
}

namespace {

std::string describe(const SubsetSpec& s) {
    std::string out = s.name + " {";
    for (std::size_t i = 0; i < s.features.size(); ++i) out += (i ? "," : "") + s.features[i];
    return out + "}";
}

bool strict_subset(const SubsetSpec& a, const SubsetSpec& b) {
    return a.features.size() < b.features.size() && is_subset_of(a.features, b.features);
}

std::vector<SubsetSpec> sorted_unique(std::span<const SubsetSpec> specs) {
    if (specs.empty()) throw Error(ErrorCode::InvalidArgument, "at least one subset spec is required");
    std::vector<SubsetSpec> sorted(specs.begin(), specs.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.features.size() < b.features.size(); });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
            if (sorted[i].features.size() == sorted[j].features.size() &&
                is_subset_of(sorted[i].features, sorted[j].features)) {
                throw Error(ErrorCode::DuplicateFeatureSet, describe(sorted[i]) + " and " + describe(sorted[j]));
            }
        }
    }
    return sorted;
}

}  // namespace

std::vector<SubsetSpec> validate_nested_chain(std::span<const SubsetSpec> specs) {
    auto sorted = sorted_unique(specs);
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        if (!strict_subset(sorted[i], sorted[i + 1])) {
            throw Error(ErrorCode::NotNested, describe(sorted[i]) + " is not contained in " + describe(sorted[i + 1]));
        }
    }
    return sorted;
}

bool NestingTopology::is_chain() const {
    for (std::size_t i = 0; i < parent.size(); ++i) {
        if (parent[i] != static_cast<int>(i) - 1) return false;
    }
    return true;
}

NestingTopology nesting_topology(std::span<const SubsetSpec> specs) {
    NestingTopology topo;
    topo.specs = sorted_unique(specs);
    topo.parent.assign(topo.specs.size(), -1);
    const auto& s = topo.specs;
    for (std::size_t k = 1; k < s.size(); ++k) {
        std::vector<std::size_t> ancestors;
        for (std::size_t j = 0; j < k; ++j) {
            if (strict_subset(s[j], s[k])) ancestors.push_back(j);
        }
        if (ancestors.empty() || ancestors.front() != 0) {
            throw Error(ErrorCode::NotNested, describe(s[0]) + " is not contained in " + describe(s[k]));
        }
        for (std::size_t a = 0; a + 1 < ancestors.size(); ++a) {
            if (!strict_subset(s[ancestors[a]], s[ancestors[a + 1]])) {
                throw Error(ErrorCode::NotNested, "ancestors of " + describe(s[k]) + " do not form a chain: " +
                                                      describe(s[ancestors[a]]) + " vs " +
                                                      describe(s[ancestors[a + 1]]));
            }
        }
        topo.parent[k] = static_cast<int>(ancestors.back());
    }
    return topo;
}

}  // namespace routeboost
