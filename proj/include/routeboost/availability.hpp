#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "routeboost/dataset.hpp"

namespace routeboost {

/// Rows sharing exactly one set of present signals.
struct AvailabilityPattern {
    SignalSet present;  // dataset column order
    std::size_t count = 0;

    bool operator==(const AvailabilityPattern&) const = default;
};

/// Signals from one processing unit; missing together when the unit is skipped.
struct SignalGroup {
    std::string name;
    SignalSet members;

    bool operator==(const SignalGroup&) const = default;
};

/// Rows whose fully-present groups are exactly `groups_present`.
struct RoutePattern {
    std::vector<std::string> groups_present;  // in the order the groups were given
    std::size_t count = 0;

    bool operator==(const RoutePattern&) const = default;
};

/// Distinct availability patterns, count descending, ties broken by the
/// lexicographic order of the present-signal lists.
std::vector<AvailabilityPattern> pattern_summary(const Dataset& dataset);

/// Signals with identical availability columns share a group. Groups are named
/// G1, G2, ... in order of their first member's column index.
std::vector<SignalGroup> infer_signal_groups(const Dataset& dataset);

/// Signals present in every row (all signals for a 0-row dataset).
SignalSet always_available_signals(const Dataset& dataset);

/// Throws OverlappingGroups or UnknownSignal.
void validate_groups(const Dataset& dataset, std::span<const SignalGroup> groups);

/// Adds a singleton group for every signal not covered by `groups` (the target
/// excluded). Singleton groups are named after their signal.
std::vector<SignalGroup> complete_groups(const Dataset& dataset, std::span<const SignalGroup> groups);

/// Per-row group availability combinations, count descending, ties broken
/// lexicographically on the group-name lists.
std::vector<RoutePattern> route_frequencies(const Dataset& dataset, std::span<const SignalGroup> groups);

/// Indices of groups whose members are all present in `row`.
std::vector<std::size_t> groups_present_in_row(const Dataset& dataset, std::span<const SignalGroup> groups,
                                               std::size_t row);

}  // namespace routeboost
