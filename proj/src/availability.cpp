#include "routeboost/availability.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "routeboost/error.hpp"

namespace routeboost {

std::vector<AvailabilityPattern> pattern_summary(const Dataset& dataset) {
    const auto mask = availability_mask(dataset);
    std::map<std::vector<unsigned char>, std::size_t> counts;
    for (std::size_t r = 0; r < mask.rows; ++r) {
        const auto first = mask.cells.begin() + static_cast<std::ptrdiff_t>(r * mask.cols);
        ++counts[std::vector<unsigned char>(first, first + static_cast<std::ptrdiff_t>(mask.cols))];
    }

    std::vector<AvailabilityPattern> out;
    out.reserve(counts.size());
    for (const auto& [key, count] : counts) {
        AvailabilityPattern p;
        for (std::size_t c = 0; c < key.size(); ++c) {
            if (key[c]) p.present.push_back(dataset.column(c).name);
        }
        p.count = count;
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.present < b.present;
    });
    return out;
}

std::vector<SignalGroup> infer_signal_groups(const Dataset& dataset) {
    std::vector<SignalGroup> groups;
    std::vector<std::size_t> representative;  // column index of each group's first member
    for (std::size_t c = 0; c < dataset.n_signals(); ++c) {
        const auto& col = dataset.column(c);
        bool placed = false;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (dataset.column(representative[g]).present == col.present) {
                groups[g].members.push_back(col.name);
                placed = true;
                break;
            }
        }
        if (!placed) {
            groups.push_back({"G" + std::to_string(groups.size() + 1), {col.name}});
            representative.push_back(c);
        }
    }
    return groups;
}

SignalSet always_available_signals(const Dataset& dataset) {
    SignalSet out;
    for (const auto& col : dataset.columns()) {
        if (std::all_of(col.present.begin(), col.present.end(), [](auto p) { return p != 0; })) {
            out.push_back(col.name);
        }
    }
    return out;
}

void validate_groups(const Dataset& dataset, std::span<const SignalGroup> groups) {
    std::set<std::string> names;
    std::set<SignalId> seen;
    for (const auto& g : groups) {
        if (!names.insert(g.name).second) {
            throw Error(ErrorCode::OverlappingGroups, "group name '" + g.name + "' used twice");
        }
        if (g.members.empty()) throw Error(ErrorCode::InvalidArgument, "group '" + g.name + "' is empty");
        for (const auto& m : g.members) {
            if (!dataset.has_signal(m)) throw Error(ErrorCode::UnknownSignal, m + " (group '" + g.name + "')");
            if (!seen.insert(m).second) {
                throw Error(ErrorCode::OverlappingGroups, "signal '" + m + "' appears in more than one group");
            }
        }
    }
}

std::vector<SignalGroup> complete_groups(const Dataset& dataset, std::span<const SignalGroup> groups) {
    validate_groups(dataset, groups);
    std::vector<SignalGroup> out(groups.begin(), groups.end());
    std::set<SignalId> covered;
    for (const auto& g : groups) covered.insert(g.members.begin(), g.members.end());
    for (const auto& name : dataset.feature_signals()) {
        if (!covered.contains(name)) out.push_back({name, {name}});
    }
    return out;
}

std::vector<std::size_t> groups_present_in_row(const Dataset& dataset, std::span<const SignalGroup> groups,
                                               std::size_t row) {
    std::vector<std::size_t> out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const bool all = std::all_of(groups[g].members.begin(), groups[g].members.end(), [&](const SignalId& m) {
            return dataset.column(m).present[row] != 0;
        });
        if (all) out.push_back(g);
    }
    return out;
}

std::vector<RoutePattern> route_frequencies(const Dataset& dataset, std::span<const SignalGroup> groups) {
    validate_groups(dataset, groups);
    std::map<std::vector<std::size_t>, std::size_t> counts;
    for (std::size_t r = 0; r < dataset.n_rows(); ++r) ++counts[groups_present_in_row(dataset, groups, r)];

    std::vector<RoutePattern> out;
    for (const auto& [key, count] : counts) {
        RoutePattern p;
        for (auto g : key) p.groups_present.push_back(groups[g].name);
        p.count = count;
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.groups_present < b.groups_present;
    });
    return out;
}

}  // namespace routeboost
