#include <gtest/gtest.h>

#include <set>

#include "routeboost/protocol.hpp"
#include "routeboost/run_config.hpp"
#include "routeboost/synthgen.hpp"
#include "expect_error.hpp"
#include "test_support.hpp"

namespace routeboost {
namespace {

using testing::code_of;
using testing::toy6;

TEST(SplitRows, PartitionsAndIsSeeded) {
    const auto s = split_rows(1000, 0.3, 42);
    EXPECT_EQ(s.test.size(), 300u);
    EXPECT_EQ(s.train.size(), 700u);
    std::set<std::size_t> all(s.test.begin(), s.test.end());
    all.insert(s.train.begin(), s.train.end());
    EXPECT_EQ(all.size(), 1000u);
    EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
    EXPECT_EQ(split_rows(1000, 0.3, 42).test, s.test);
    EXPECT_NE(split_rows(1000, 0.3, 43).test, s.test);
    EXPECT_EQ(rows_digest(split_rows(1000, 0.3, 42).train), rows_digest(s.train));
    EXPECT_TRUE(split_rows(10, 0.0, 1).test.empty());
    EXPECT_EQ(code_of([] { split_rows(10, 1.0, 1); }), ErrorCode::InvalidArgument);
}

TEST(BuildSpecs, ConfiguredGroupsWinOverInference) {
    SubsetOptions o;
    o.groups = {{"unit_c", {"C"}}};
    const auto groups = resolve_groups(toy6(), o);
    ASSERT_EQ(groups.size(), 1u);
    EXPECT_EQ(groups[0].name, "unit_c");
    const auto specs = build_specs(toy6(), o);
    // D is ungrouped and becomes its own singleton group
    ASSERT_EQ(specs.size(), 3u);
    EXPECT_EQ(specs[1].features, (SignalSet{"A", "C"}));
    EXPECT_EQ(specs[2].features, (SignalSet{"A", "D"}));
}

TEST(BuildSpecs, RoutesNeedSegments) {
    SubsetOptions o;
    o.strategy = Strategy::Routes;
    EXPECT_EQ(code_of([&] { build_specs(toy6(), o); }), ErrorCode::Config);
}

TEST(TrainEnsemble, Toy6Modes) {
    const auto specs = build_specs(toy6(), {});
    EXPECT_EQ(train_ensemble(toy6(), specs, EnsembleMode::Bagging, {}).members.size(), 3u);
    const auto boosted = train_ensemble(toy6(), specs, EnsembleMode::Boosting, {});
    ASSERT_EQ(boosted.members.size(), 3u);
    EXPECT_EQ(boosted.members[0].name, "base");
}

TEST(Benchmark, Toy6ConventionalIsNotAvailable) {
    BenchmarkOptions o;
    o.test_fraction = 0.0;
    const auto r = run_benchmark(toy6(), o);
    EXPECT_FALSE(r.conventional.has_value());
    EXPECT_EQ(r.conventional_note, "n/a (no complete cases)");
    EXPECT_NE(r.table().find("n/a (no complete cases)"), std::string::npos);
    EXPECT_EQ(r.to_json()["arms"]["conventional"]["error"], "n/a (no complete cases)");
}

TEST(Benchmark, CompleteDataBothArmsAgree) {
    auto l = synth::default_layout();
    l.routes = {{"all", {"DES", "BOF", "CCM", "RH-LF", "HSM1", "PLTCM", "CAL"}, 1.0}};
    const auto d = synth::generate({l, 600, 8});
    BenchmarkOptions o;
    o.seed = 3;
    const auto r = run_benchmark(d, o);
    ASSERT_EQ(r.specs.size(), 1u);
    ASSERT_TRUE(r.conventional_metrics.has_value());
    const auto& a = r.proposed_metrics.strata[0].metrics;
    const auto& b = r.conventional_metrics->strata[0].metrics;
    EXPECT_NEAR(*a.mae, *b.mae, 1e-12);
    EXPECT_NEAR(*a.r2, *b.r2, 1e-12);
}

TEST(Benchmark, SteelTableHasRouteColumns) {
    const auto l = synth::default_layout();
    const auto d = synth::generate({l, 3000, 42});
    BenchmarkOptions o;
    o.subsets.strategy = Strategy::Routes;
    o.subsets.groups = synth::layout_groups(l);
    o.subsets.segments = synth::layout_segments(l);
    o.seed = 42;
    const auto r = run_benchmark(d, o);
    const auto t = r.table();
    for (const auto* s : {"narrow", "balanced", "wide", "Proposed Method", "Conventional Model"}) {
        EXPECT_NE(t.find(s), std::string::npos) << s;
    }
    // the conventional arm only scores wide rows; narrow rows lack its inputs
    EXPECT_GT(r.conventional_metrics->find("narrow")->no_applicable, 0u);
    EXPECT_EQ(r.proposed_metrics.no_applicable, 0u);
}

TEST(RunConfig, ParsesKnownKeys) {
    const auto j = nlohmann::json::parse(R"({
        "data": "plant.csv", "target": "Y",
        "groups": [{"name": "c", "signals": ["C"]}],
        "segments": [{"name": "s", "groups": ["c"]}],
        "strategy": "routes", "include_base_signals": false, "min_support": 0.2,
        "uncommon_policy": "merge_common",
        "learner": {"kind": "tree", "max_depth": 3, "min_leaf": 2},
        "mode": "bagging", "seed": 9, "test_fraction": 0.25,
        "coalesce": [{"name": "B", "sources": ["B1", "B2"]}]
    })");
    const auto c = run_config_from_json(j);
    EXPECT_EQ(*c.target, "Y");
    EXPECT_EQ(c.subsets.strategy, Strategy::Routes);
    EXPECT_TRUE(c.strategy_given);
    EXPECT_FALSE(c.subsets.include_base_signals);
    EXPECT_EQ(c.subsets.uncommon_policy, UncommonPolicy::MergeCommon);
    EXPECT_EQ(c.learner.kind, LearnerKind::Tree);
    EXPECT_EQ(c.learner.tree_max_depth, 3);
    EXPECT_EQ(c.mode, EnsembleMode::Bagging);
    EXPECT_EQ(c.seed, 9u);
    ASSERT_EQ(c.coalesce.size(), 1u);
    EXPECT_EQ(c.coalesce[0].sources, (SignalSet{"B1", "B2"}));
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
    EXPECT_EQ(code_of([] { run_config_from_json({{"colour", "red"}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { run_config_from_json({{"strategy", "random"}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { run_config_from_json({{"seed", "x"}}); }), ErrorCode::Config);
    EXPECT_EQ(code_of([] { load_run_config("/nonexistent/config.json"); }), ErrorCode::Io);
}

TEST(RunConfig, CoalesceDirectives) {
    const auto c = parse_coalesce("B=B1,B2");
    EXPECT_EQ(c.name, "B");
    EXPECT_EQ(c.sources, (SignalSet{"B1", "B2"}));
    EXPECT_EQ(code_of([] { parse_coalesce("B"); }), ErrorCode::Config);
    const auto d = parse_csv("A,B1,B2,Y\n1,1,,1\n2,,2,2\n", "Y");
    EXPECT_EQ(apply_coalesce(d, {c}).signals(), (SignalSet{"A", "B", "Y"}));
}

}  // namespace
}  // namespace routeboost
