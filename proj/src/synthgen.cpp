#include "routeboost/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <omp.h>

#include "routeboost/error.hpp"

namespace routeboost::synth {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

namespace {

// mt19937_64 output is fixed by the standard; the distributions below are
// spelled out because std:: distributions are implementation-defined.
class RowStream {
public:
    RowStream(std::uint64_t seed, std::size_t row)
        : engine_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(row)))) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double draw(const SignalDistribution& d) {
        if (d.kind == SignalDistribution::Kind::Uniform) return d.a + (d.b - d.a) * uniform01();
        return d.a + d.b * normal();
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace

void PlantLayout::validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidLayout, m); };
    if (units.empty()) fail("layout has no units");
    if (routes.empty()) fail("layout has no routes");
    std::set<std::string> unit_names;
    std::set<SignalId> signal_names;
    for (const auto& u : units) {
        if (!unit_names.insert(u.name).second) fail("duplicate unit '" + u.name + "'");
        for (const auto& s : u.signals) {
            if (s.name.empty() || s.name.find_first_of(",\n\r") != std::string::npos) {
                fail("invalid signal name '" + s.name + "'");
            }
            if (!signal_names.insert(s.name).second) fail("duplicate signal '" + s.name + "'");
            const auto& d = s.distribution;
            if (!std::isfinite(d.a) || !std::isfinite(d.b)) fail("non-finite distribution for '" + s.name + "'");
            if (d.kind == SignalDistribution::Kind::Uniform && d.b < d.a) fail("uniform low > high for '" + s.name + "'");
            if (d.kind == SignalDistribution::Kind::Normal && d.b < 0.0) fail("negative sd for '" + s.name + "'");
        }
    }
    if (target.name.empty() || signal_names.contains(target.name)) fail("target name clashes or is empty");
    double total = 0.0;
    for (const auto& r : routes) {
        if (!(r.probability > 0.0)) fail("route '" + r.name + "' needs a positive probability");
        if (r.units.empty()) fail("route '" + r.name + "' has no units");
        std::set<std::string> seen;
        for (const auto& u : r.units) {
            if (!unit_names.contains(u)) fail("route '" + r.name + "' references unknown unit '" + u + "'");
            if (!seen.insert(u).second) fail("route '" + r.name + "' visits '" + u + "' twice");
        }
        total += r.probability;
    }
    if (std::abs(total - 1.0) > 1e-9) fail("route probabilities sum to " + std::to_string(total));
    for (const auto& [name, coef] : target.coefficients) {
        if (!signal_names.contains(name)) fail("coefficient references undeclared signal '" + name + "'");
        if (!std::isfinite(coef)) fail("non-finite coefficient for '" + name + "'");
    }
    if (!(target.noise_sigma >= 0.0) || !std::isfinite(target.intercept)) fail("invalid noise_sigma or intercept");
}

SignalSet PlantLayout::route_signals(std::size_t route) const {
    const auto& r = routes.at(route);
    SignalSet out;
    for (const auto& u : units) {
        if (std::find(r.units.begin(), r.units.end(), u.name) == r.units.end()) continue;
        for (const auto& s : u.signals) out.push_back(s.name);
    }
    return out;
}

PlantLayout default_layout() {
    using K = SignalDistribution::Kind;
    auto unit = [](std::string name, std::string prefix, K second) {
        const SignalDistribution first{K::Normal, 0.0, 1.0};
        const SignalDistribution other = second == K::Normal ? first : SignalDistribution{K::Uniform, -1.5, 1.5};
        return Unit{name, {{prefix + "_1", first}, {prefix + "_2", other}}};
    };
    PlantLayout layout;
    layout.units = {
        unit("DES", "DES", K::Uniform),     unit("BOF", "BOF", K::Uniform),     unit("CCM", "CCM", K::Uniform),
        unit("RH-LF", "RHLF", K::Normal),   unit("HSM1", "HSM1", K::Uniform),   unit("PLTCM", "PLTCM", K::Uniform),
        unit("CAL", "CAL", K::Uniform),
    };
    layout.routes = {
        {"narrow", {"PLTCM", "CAL"}, 0.5},
        {"balanced", {"HSM1", "PLTCM", "CAL"}, 0.3},
        {"wide", {"DES", "BOF", "CCM", "RH-LF", "HSM1", "PLTCM", "CAL"}, 0.2},
    };
    layout.target.name = "quality";
    layout.target.intercept = 5.0;
    layout.target.noise_sigma = 1.5;
    layout.target.coefficients = {
        {"DES_1", 0.9},  {"DES_2", 0.8},  {"BOF_1", 0.7},   {"BOF_2", 0.9},   {"CCM_1", 0.8},
        {"CCM_2", 0.7},  {"RHLF_1", 0.6}, {"RHLF_2", 0.8},  {"HSM1_1", 1.2},  {"HSM1_2", 1.0},
        {"PLTCM_1", 1.0}, {"PLTCM_2", -0.8}, {"CAL_1", 0.9}, {"CAL_2", 0.7},
    };
    return layout;
}

GeneratedData generate_with_routes(const GenSpec& spec, Exec exec) {
    const auto& layout = spec.layout;
    layout.validate();
    if (spec.n_rows < 1) throw Error(ErrorCode::InvalidLayout, "n_rows must be >= 1");

    // Flattened signal table in column order.
    struct Slot {
        std::size_t unit;
        const SignalDistribution* dist;
        double coefficient;
    };
    std::vector<Slot> slots;
    std::vector<Column> columns;
    for (std::size_t u = 0; u < layout.units.size(); ++u) {
        for (const auto& s : layout.units[u].signals) {
            const auto it = layout.target.coefficients.find(s.name);
            slots.push_back({u, &s.distribution, it == layout.target.coefficients.end() ? 0.0 : it->second});
            columns.push_back({s.name, std::vector<double>(spec.n_rows, 0.0), std::vector<unsigned char>(spec.n_rows, 0)});
        }
    }
    columns.push_back({layout.target.name, std::vector<double>(spec.n_rows, 0.0),
                       std::vector<unsigned char>(spec.n_rows, 1)});

    std::vector<std::vector<unsigned char>> visits(layout.routes.size(),
                                                   std::vector<unsigned char>(layout.units.size(), 0));
    for (std::size_t r = 0; r < layout.routes.size(); ++r) {
        for (std::size_t u = 0; u < layout.units.size(); ++u) {
            const auto& names = layout.routes[r].units;
            visits[r][u] = std::find(names.begin(), names.end(), layout.units[u].name) != names.end();
        }
    }

    std::vector<std::size_t> route_of_row(spec.n_rows);
    auto make_row = [&](std::size_t row) {
        RowStream rng(spec.seed, row);
        const double u = rng.uniform01();
        std::size_t route = layout.routes.size() - 1;
        double cumulative = 0.0;
        for (std::size_t r = 0; r < layout.routes.size(); ++r) {
            cumulative += layout.routes[r].probability;
            if (u < cumulative) {
                route = r;
                break;
            }
        }
        route_of_row[row] = route;
        double y = layout.target.intercept;
        for (std::size_t s = 0; s < slots.size(); ++s) {
            if (!visits[route][slots[s].unit]) continue;
            const double v = rng.draw(*slots[s].dist);
            columns[s].values[row] = v;
            columns[s].present[row] = 1;
            y += slots[s].coefficient * v;
        }
        y += layout.target.noise_sigma * rng.normal();
        columns.back().values[row] = y;
    };

    const auto n = static_cast<std::ptrdiff_t>(spec.n_rows);
    if (exec == Exec::Serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) make_row(static_cast<std::size_t>(i));
    } else {
#pragma omp parallel for schedule(static) if (n > 2048)
        for (std::ptrdiff_t i = 0; i < n; ++i) make_row(static_cast<std::size_t>(i));
    }
    return {Dataset(std::move(columns), layout.target.name), std::move(route_of_row)};
}

Dataset generate(const GenSpec& spec, Exec exec) { return generate_with_routes(spec, exec).data; }

std::vector<SignalGroup> layout_groups(const PlantLayout& layout) {
    std::vector<SignalGroup> groups;
    for (const auto& u : layout.units) {
        if (u.signals.empty()) continue;
        SignalGroup g{u.name, {}};
        for (const auto& s : u.signals) g.members.push_back(s.name);
        groups.push_back(std::move(g));
    }
    return groups;
}

std::vector<RouteSegment> layout_segments(const PlantLayout& layout) {
    std::vector<RouteSegment> out;
    for (const auto& r : layout.routes) {
        RouteSegment seg{r.name, {}};
        for (const auto& u : r.units) {
            const auto it = std::find_if(layout.units.begin(), layout.units.end(),
                                         [&](const Unit& unit) { return unit.name == u; });
            if (it != layout.units.end() && !it->signals.empty()) seg.groups.push_back(u);
        }
        out.push_back(std::move(seg));
    }
    return out;
}

json to_json(const PlantLayout& layout) {
    json units = json::array();
    for (const auto& u : layout.units) {
        json signals = json::array();
        for (const auto& s : u.signals) {
            if (s.distribution.kind == SignalDistribution::Kind::Uniform) {
                signals.push_back({{"name", s.name}, {"dist", "uniform"}, {"low", s.distribution.a}, {"high", s.distribution.b}});
            } else {
                signals.push_back({{"name", s.name}, {"dist", "normal"}, {"mean", s.distribution.a}, {"sd", s.distribution.b}});
            }
        }
        units.push_back({{"name", u.name}, {"signals", signals}});
    }
    json routes = json::array();
    for (const auto& r : layout.routes) {
        routes.push_back({{"name", r.name}, {"units", r.units}, {"probability", r.probability}});
    }
    return json{{"units", units},
                {"routes", routes},
                {"target", {{"name", layout.target.name},
                            {"intercept", layout.target.intercept},
                            {"coefficients", layout.target.coefficients},
                            {"noise_sigma", layout.target.noise_sigma}}}};
}

PlantLayout layout_from_json(const json& j) {
    try {
        PlantLayout layout;
        for (const auto& u : j.at("units")) {
            Unit unit{u.at("name").get<std::string>(), {}};
            for (const auto& s : u.at("signals")) {
                SignalSpec sig{s.at("name").get<std::string>(), {}};
                const auto dist = s.value("dist", std::string("normal"));
                if (dist == "uniform") {
                    sig.distribution = {SignalDistribution::Kind::Uniform, s.at("low").get<double>(), s.at("high").get<double>()};
                } else if (dist == "normal") {
                    sig.distribution = {SignalDistribution::Kind::Normal, s.value("mean", 0.0), s.value("sd", 1.0)};
                } else {
                    throw Error(ErrorCode::InvalidLayout, "unknown distribution '" + dist + "'");
                }
                unit.signals.push_back(std::move(sig));
            }
            layout.units.push_back(std::move(unit));
        }
        for (const auto& r : j.at("routes")) {
            layout.routes.push_back({r.at("name").get<std::string>(), r.at("units").get<std::vector<std::string>>(),
                                     r.at("probability").get<double>()});
        }
        const auto& t = j.at("target");
        layout.target.name = t.value("name", std::string("target"));
        layout.target.intercept = t.value("intercept", 0.0);
        layout.target.noise_sigma = t.value("noise_sigma", 0.0);
        if (t.contains("coefficients")) layout.target.coefficients = t["coefficients"].get<std::map<SignalId, double>>();
        layout.validate();
        return layout;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidLayout, std::string("invalid layout JSON: ") + e.what());
    }
}

}  // namespace routeboost::synth
