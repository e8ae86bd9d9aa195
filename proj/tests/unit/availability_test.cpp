#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "routeboost/availability.hpp"
#include "routeboost/error.hpp"
#include "routeboost/synthgen.hpp"
#include "expect_error.hpp"
#include "test_support.hpp"

namespace routeboost {
namespace {

using testing::toy6;

TEST(PatternSummary, Toy6) {
    const auto p = pattern_summary(toy6());
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[0], (AvailabilityPattern{{"A", "C", "Y"}, 3}));
    EXPECT_EQ(p[1], (AvailabilityPattern{{"A", "D", "Y"}, 3}));
}

TEST(PatternSummary, CompleteAndEmpty) {
    const auto complete = parse_csv("A,Y\n1,2\n3,4\n", "Y");
    const auto p = pattern_summary(complete);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p[0].count, 2u);
    EXPECT_TRUE(pattern_summary(parse_csv("A,Y\n", "Y")).empty());
}

TEST(InferGroups, Toy6) {
    const auto g = infer_signal_groups(toy6());
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g[0], (SignalGroup{"G1", {"A", "Y"}}));
    EXPECT_EQ(g[1], (SignalGroup{"G2", {"C"}}));
    EXPECT_EQ(g[2], (SignalGroup{"G3", {"D"}}));
}

TEST(InferGroups, FusedStationLayout) {
    // A, B (B1/B2 merged), C, D, E with C on the top half and D on the bottom
    const auto d = parse_csv("A,B,C,D,E,Y\n1,1,1,,1,1\n2,2,2,,2,2\n3,3,,3,3,3\n4,4,,4,4,4\n", "Y");
    const auto g = infer_signal_groups(d);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g[0].members, (SignalSet{"A", "B", "E", "Y"}));
    EXPECT_EQ(g[1].members, (SignalSet{"C"}));
    EXPECT_EQ(g[2].members, (SignalSet{"D"}));
}

TEST(InferGroups, CompleteDatasetIsOneGroup) {
    const auto g = infer_signal_groups(parse_csv("A,B,Y\n1,2,3\n", "Y"));
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g[0].members.size(), 3u);
}

TEST(InferGroups, InvariantUnderColumnPermutation) {
    std::mt19937_64 rng(5);
    const auto d = testing::random_masked_dataset(rng, {.n_rows = 60, .n_groups = 5, .p_base = 0.9});
    auto normalize = [](const std::vector<SignalGroup>& groups) {
        std::set<std::set<SignalId>> out;
        for (const auto& g : groups) out.insert(std::set<SignalId>(g.members.begin(), g.members.end()));
        return out;
    };
    std::vector<std::size_t> perm(d.n_signals());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Column> cols;
    for (auto i : perm) cols.push_back(d.column(i));
    const Dataset shuffled(std::move(cols), "y");
    EXPECT_EQ(normalize(infer_signal_groups(d)), normalize(infer_signal_groups(shuffled)));
}

TEST(AlwaysAvailable, Cases) {
    EXPECT_EQ(always_available_signals(toy6()), (SignalSet{"A", "Y"}));
    EXPECT_TRUE(always_available_signals(parse_csv("A,Y\n1,\n,2\n", "Y")).empty());
    EXPECT_EQ(always_available_signals(parse_csv("A,Y\n", "Y")), (SignalSet{"A", "Y"}));
}

TEST(AlwaysAvailable, EqualsIntersectionOfPatterns) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = testing::random_masked_dataset(rng, {.n_rows = 30, .p_base = 0.95, .p_target_hole = 0.05});
        const auto patterns = pattern_summary(d);
        std::set<SignalId> inter(patterns[0].present.begin(), patterns[0].present.end());
        for (const auto& p : patterns) {
            std::set<SignalId> next;
            for (const auto& s : p.present) {
                if (inter.contains(s)) next.insert(s);
            }
            inter = next;
        }
        const auto always = always_available_signals(d);
        EXPECT_EQ(std::set<SignalId>(always.begin(), always.end()), inter);
    }
}

TEST(RouteFrequencies, Toy6) {
    const std::vector<SignalGroup> groups{{"A", {"A"}}, {"C", {"C"}}, {"D", {"D"}}};
    const auto r = route_frequencies(toy6(), groups);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0], (RoutePattern{{"A", "C"}, 3}));
    EXPECT_EQ(r[1], (RoutePattern{{"A", "D"}, 3}));
}

TEST(RouteFrequencies, OverlappingGroups) {
    const std::vector<SignalGroup> groups{{"x", {"C"}}, {"y", {"C"}}};
    EXPECT_EQ(testing::code_of([&] { route_frequencies(toy6(), groups); }), ErrorCode::OverlappingGroups);
}

TEST(RouteFrequencies, UnknownSignal) {
    const std::vector<SignalGroup> groups{{"x", {"Q"}}};
    EXPECT_EQ(testing::code_of([&] { route_frequencies(toy6(), groups); }), ErrorCode::UnknownSignal);
}

TEST(RouteFrequencies, DefaultLayoutSeed7MostFrequentIsNarrow) {
    const auto layout = synth::default_layout();
    const auto d = synth::generate({layout, 1000, 7});
    const auto r = route_frequencies(d, synth::layout_groups(layout));
    ASSERT_FALSE(r.empty());
    EXPECT_EQ(r[0].groups_present, (std::vector<std::string>{"PLTCM", "CAL"}));

    // independent count straight from the mask
    std::size_t narrow = 0;
    for (std::size_t row = 0; row < d.n_rows(); ++row) {
        if (!d.column("HSM1_1").present[row] && d.column("PLTCM_1").present[row]) ++narrow;
    }
    EXPECT_EQ(r[0].count, narrow);
}

TEST(Partition, CountsSumToRowsWithShuffledRows) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = testing::random_masked_dataset(rng, {.n_rows = 37, .p_base = 0.8, .p_target_hole = 0.1});
        std::size_t sum = 0;
        for (const auto& p : pattern_summary(d)) sum += p.count;
        EXPECT_EQ(sum, d.n_rows());
        sum = 0;
        for (const auto& r : route_frequencies(d, infer_signal_groups(d))) sum += r.count;
        EXPECT_EQ(sum, d.n_rows());
    }
}

}  // namespace
}  // namespace routeboost
