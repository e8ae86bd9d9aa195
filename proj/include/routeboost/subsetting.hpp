#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "routeboost/availability.hpp"
#include "routeboost/dataset.hpp"

namespace routeboost {

/// A named feature set. Its materialization keeps the rows where every feature
/// and the target are present, so it never contains a missing cell.
struct SubsetSpec {
    std::string name;
    SignalSet features;  // target excluded

    bool operator==(const SubsetSpec&) const = default;
};

/// Ordered group names an item must have passed to enter a subset.
struct RouteSegment {
    std::string name;
    std::vector<std::string> groups;
};

enum class UncommonPolicy { Drop, MergeCommon };

struct AutoRouteOptions {
    double min_support = 0.05;
};

/// Base spec over the always-available signals plus one spec per group that is
/// not always available. With `include_base_signals` each group spec also
/// carries the base signals. Throws NoBaseSignals, OverlappingGroups.
std::vector<SubsetSpec> subsets_by_grouped_signals(const Dataset& dataset, std::span<const SignalGroup> groups,
                                                   bool include_base_signals);

/// One spec per given segment (features = union of its groups' signals).
/// Throws UnknownGroup, EmptySegment, NoQualifyingRoutes.
std::vector<SubsetSpec> subsets_by_common_routes(const Dataset& dataset, std::span<const SignalGroup> groups,
                                                 std::span<const RouteSegment> segments, UncommonPolicy policy);

/// Segments derived from route_frequencies: every group combination reaching
/// `min_support` of the rows becomes a spec named by its sorted groups joined
/// with '+'.
std::vector<SubsetSpec> subsets_by_common_routes(const Dataset& dataset, std::span<const SignalGroup> groups,
                                                 const AutoRouteOptions& options, UncommonPolicy policy);

/// True iff every feature (and the target, when the dataset has one) is present.
bool row_qualifies(const Dataset& dataset, const SubsetSpec& spec, std::size_t row);

/// Ascending indices of qualifying rows. Throws UnknownSignal.
std::vector<std::size_t> subset_rows(const Dataset& dataset, const SubsetSpec& spec);

/// Rows qualifying for none of the specs.
std::vector<std::size_t> uncovered_rows(const Dataset& dataset, std::span<const SubsetSpec> specs);

/// Projection onto features + target over qualifying rows. Throws
/// UnknownSignal, EmptySubset.
Dataset materialize(const Dataset& dataset, const SubsetSpec& spec);

/// Orders specs by feature count so that each is a strict subset of the next.
/// Throws NotNested, DuplicateFeatureSet, InvalidArgument (empty input).
std::vector<SubsetSpec> validate_nested_chain(std::span<const SubsetSpec> specs);

/// Residual topology for boosting: a linear chain when the specs nest, or a
/// base shared by branches whose own ancestors nest. parent[0] == -1 and every
/// other parent indexes an earlier spec that is a strict subset.
struct NestingTopology {
    std::vector<SubsetSpec> specs;
    std::vector<int> parent;

    bool is_chain() const;
};

/// Throws NotNested, DuplicateFeatureSet, InvalidArgument.
NestingTopology nesting_topology(std::span<const SubsetSpec> specs);

/// True iff every element of `sub` appears in `super`.
bool is_subset_of(std::span<const SignalId> sub, std::span<const SignalId> super);

}  // namespace routeboost
