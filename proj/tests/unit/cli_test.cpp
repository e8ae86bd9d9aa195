#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "routeboost/ensemble.hpp"

namespace {

namespace fs = std::filesystem;

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(ROUTEBOOST_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string toy6() { return std::string(ROUTEBOOST_FIXTURES) + "/toy6.csv"; }

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("routeboost_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p);
        return {std::istreambuf_iterator<char>(in), {}};
    }

private:
    fs::path dir_;
};

TEST_F(CliTest, AnalyzeToy6) {
    const auto r = run("analyze --data " + toy6() + " --target Y --report " + path("report.json"));
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("availability patterns (2)"), std::string::npos);
    EXPECT_NE(r.out.find("inferred signal groups (3)"), std::string::npos);
    const auto report = nlohmann::json::parse(slurp(path("report.json")));
    EXPECT_EQ(report["patterns"].size(), 2u);
    EXPECT_EQ(report["inferred_groups"].size(), 3u);
}

TEST_F(CliTest, AnalyzeCompleteCsv) {
    std::ofstream(path("c.csv")) << "A,B,Y\n1,2,3\n4,5,6\n";
    const auto r = run("analyze --data " + path("c.csv") + " --target Y");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("availability patterns (1)"), std::string::npos);
    EXPECT_NE(r.out.find("inferred signal groups (1)"), std::string::npos);
}

TEST_F(CliTest, InputErrorsExitWithTwo) {
    EXPECT_EQ(run("analyze --data /nonexistent.csv --target Y").code, 2);
    EXPECT_EQ(run("analyze --data " + toy6() + " --target Q").code, 2);
    EXPECT_EQ(run("analyze --bogus-flag").code, 2);
    std::ofstream(path("bad.json")) << R"({"unknown": 1})";
    EXPECT_EQ(run("--config " + path("bad.json") + " analyze --data " + toy6() + " --target Y").code, 2);
}

TEST_F(CliTest, DomainErrorsExitWithOne) {
    std::ofstream(path("cfg.json")) << R"({"groups": [{"name": "c", "signals": ["C"]}, {"name": "d", "signals": ["D"]}],
        "segments": [{"name": "sc", "groups": ["c"]}, {"name": "sd", "groups": ["d"]}], "strategy": "routes"})";
    const auto r = run("--config " + path("cfg.json") + " train --data " + toy6() + " --target Y --model " +
                       path("m.json"));
    EXPECT_EQ(r.code, 1) << r.out;
    EXPECT_NE(r.out.find("NotNested"), std::string::npos);
}

TEST_F(CliTest, TrainBaggingAndBoostingToy6) {
    ASSERT_EQ(run("train --data " + toy6() + " --target Y --mode bagging --model " + path("bag.json")).code, 0);
    const auto bag = routeboost::load_model(path("bag.json"));
    EXPECT_EQ(bag.mode, routeboost::EnsembleMode::Bagging);
    EXPECT_EQ(bag.members.size(), 3u);

    ASSERT_EQ(run("train --data " + toy6() + " --target Y --model " + path("boost.json") + " --manifest " +
                  path("manifest.json"))
                  .code,
              0);
    const auto boost = routeboost::load_model(path("boost.json"));
    ASSERT_EQ(boost.members.size(), 3u);
    EXPECT_EQ(boost.members[1].parent, 0);
    EXPECT_EQ(boost.members[2].parent, 0);
    EXPECT_EQ(nlohmann::json::parse(slurp(path("manifest.json"))).size(), 3u);
}

TEST_F(CliTest, PredictReportsMembersAndMissingBase) {
    ASSERT_EQ(run("train --data " + toy6() + " --target Y --model " + path("m.json")).code, 0);
    std::ofstream(path("in.csv")) << "A,C,D\n1,10,\n4,,5\n,10,\n";
    const auto r = run("predict --model " + path("m.json") + " --input " + path("in.csv") + " --output " +
                       path("out.csv"));
    ASSERT_EQ(r.code, 0) << r.out;
    const auto out = slurp(path("out.csv"));
    EXPECT_NE(out.find("row,prediction,members,reason\n"), std::string::npos);
    EXPECT_NE(out.find("\"base,r1\""), std::string::npos);
    EXPECT_NE(out.find("\"base,r2\""), std::string::npos);
    EXPECT_NE(out.find("2,,,no-applicable-model"), std::string::npos) << out;
}

TEST_F(CliTest, PredictSteelMembers) {
    ASSERT_EQ(run("generate --rows 2000 --seed 1 --output " + path("steel.csv")).code, 0);
    ASSERT_EQ(run("generate --rows 2000 --seed 1 --layout-out " + path("layout.json") + " --output " +
                  path("again.csv"))
                  .code,
              0);
    EXPECT_EQ(slurp(path("steel.csv")), slurp(path("again.csv")));

    std::ofstream(path("cfg.json")) << R"({"strategy": "routes",
        "groups": [{"name": "up", "signals": ["DES_1","DES_2","BOF_1","BOF_2","CCM_1","CCM_2","RHLF_1","RHLF_2"]},
                   {"name": "hsm", "signals": ["HSM1_1","HSM1_2"]},
                   {"name": "cold", "signals": ["PLTCM_1","PLTCM_2","CAL_1","CAL_2"]}],
        "segments": [{"name": "narrow", "groups": ["cold"]}, {"name": "balanced", "groups": ["hsm","cold"]},
                     {"name": "wide", "groups": ["up","hsm","cold"]}]})";
    ASSERT_EQ(run("--config " + path("cfg.json") + " train --data " + path("steel.csv") +
                  " --target quality --model " + path("m.json"))
                  .code,
              0);
    const auto r = run("predict --model " + path("m.json") + " --input " + path("steel.csv"));
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find(",\"narrow\","), std::string::npos);
    EXPECT_NE(r.out.find(",\"narrow,balanced\","), std::string::npos);
    EXPECT_NE(r.out.find(",\"narrow,balanced,wide\","), std::string::npos);
}

TEST_F(CliTest, EvaluateWritesReport) {
    ASSERT_EQ(run("train --data " + toy6() + " --target Y --model " + path("m.json")).code, 0);
    const auto r = run("evaluate --data " + toy6() + " --target Y --model " + path("m.json") + " --report " +
                       path("eval.json"));
    ASSERT_EQ(r.code, 0) << r.out;
    const auto j = nlohmann::json::parse(slurp(path("eval.json")));
    EXPECT_EQ(j["overall"]["n"], 6);
    EXPECT_NEAR(j["overall"]["mae"].get<double>(), 0.0, 1e-6);
}

TEST_F(CliTest, BenchmarkToy6AndSynthetic) {
    const auto toy = run("benchmark --data " + toy6() + " --target Y --test-fraction 0");
    ASSERT_EQ(toy.code, 0) << toy.out;
    EXPECT_NE(toy.out.find("n/a (no complete cases)"), std::string::npos);

    const auto syn = run("benchmark --synthetic --rows 3000 --seed 42 --report " + path("bench.json"));
    ASSERT_EQ(syn.code, 0) << syn.out;
    for (const auto* s : {"narrow", "balanced", "wide", "Proposed Method", "Conventional Model"}) {
        EXPECT_NE(syn.out.find(s), std::string::npos) << s;
    }
    const auto j = nlohmann::json::parse(slurp(path("bench.json")));
    EXPECT_EQ(j["split"]["test"], 900);
    EXPECT_EQ(j["arms"]["proposed"]["train_partition_digest"], j["arms"]["conventional"]["train_partition_digest"]);
}

}  // namespace
