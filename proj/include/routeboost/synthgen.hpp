#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "routeboost/availability.hpp"
#include "routeboost/dataset.hpp"
#include "routeboost/kernels.hpp"
#include "routeboost/subsetting.hpp"

namespace routeboost::synth {

struct SignalDistribution {
    enum class Kind { Uniform, Normal };
    Kind kind = Kind::Normal;
    double a = 0.0;  // uniform: low,  normal: mean
    double b = 1.0;  // uniform: high, normal: standard deviation
};

struct SignalSpec {
    SignalId name;
    SignalDistribution distribution;
};

struct Unit {
    std::string name;
    std::vector<SignalSpec> signals;
};

struct Route {
    std::string name;
    std::vector<std::string> units;
    double probability = 0.0;
};

/// target = intercept + sum of coefficient * value over signals of traversed
/// units + N(0, noise_sigma²). Untraversed units contribute nothing.
struct TargetRule {
    SignalId name = "target";
    double intercept = 0.0;
    std::map<SignalId, double> coefficients;
    double noise_sigma = 0.0;
};

struct PlantLayout {
    std::vector<Unit> units;
    std::vector<Route> routes;
    TargetRule target;

    /// Throws InvalidLayout.
    void validate() const;

    /// Signals of the given route's units, in layout column order.
    SignalSet route_signals(std::size_t route) const;
};

struct GenSpec {
    PlantLayout layout;
    std::size_t n_rows = 1000;
    std::uint64_t seed = 0;
};

/// Seven units (DES, BOF, CCM, RH-LF, HSM1, PLTCM, CAL) with two signals each
/// and three routes: narrow (PLTCM, CAL; p = 0.5), balanced (HSM1, PLTCM, CAL;
/// p = 0.3) and wide (every unit; p = 0.2).
PlantLayout default_layout();

struct GeneratedData {
    Dataset data;
    std::vector<std::size_t> route_of_row;
};

/// Rows draw from independent substreams keyed by (seed, row index), so the
/// first rows do not change when n_rows grows. Columns: every signal in unit
/// order, then the target.
GeneratedData generate_with_routes(const GenSpec& spec, Exec exec = Exec::Parallel);
Dataset generate(const GenSpec& spec, Exec exec = Exec::Parallel);

/// One group per unit, named after the unit.
std::vector<SignalGroup> layout_groups(const PlantLayout& layout);

/// One segment per route (its units as groups), named after the route.
std::vector<RouteSegment> layout_segments(const PlantLayout& layout);

nlohmann::json to_json(const PlantLayout& layout);
PlantLayout layout_from_json(const nlohmann::json& j);

/// SplitMix64 finalizer; used to derive per-row seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace routeboost::synth
