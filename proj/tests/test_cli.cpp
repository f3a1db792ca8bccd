// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <sys/wait.h>

#include "json.hpp"
#include "tsvlm/cli.hpp"

using namespace tsvlm;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) n += !line.empty();
    return n;
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "tsvlm");
    return run_cli(args);
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        root_ = fs::temp_directory_path() /
                fmt::format("tsvlm_cli_{}", ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(root_);
        fs::create_directories(root_);
    }
    void TearDown() override { fs::remove_all(root_); }
    std::string at(const std::string& rel) const { return (root_ / rel).string(); }

    fs::path root_;
};

} // namespace

TEST_F(Cli, GenZeroCount) {
    EXPECT_EQ(cli({"gen", "--count", "0", "--out", at("g")}), kExitOk);
    EXPECT_TRUE(fs::exists(at("g/series.jsonl")));
    EXPECT_EQ(count_lines(at("g/series.jsonl")), 0u);
    EXPECT_TRUE(fs::exists(at("g/resolved_config.json")));
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(cli({"gen", "--length", "-5", "--out", at("g")}), kExitUsage);
    EXPECT_EQ(cli({"gen", "--max-anomalies", "9", "--out", at("g")}), kExitUsage);
    EXPECT_EQ(cli({"gen", "--bogus"}), kExitUsage);
    EXPECT_EQ(cli({"nosuch"}), kExitUsage);
    fs::create_directories(at("empty"));
    EXPECT_EQ(cli({"qa", "--data", at("empty")}), kExitUsage);
    EXPECT_EQ(cli({"qa", "--data", at("missing")}), kExitUsage);
    EXPECT_EQ(cli({"eval", "--oracle", "--empty", "--dataset", at("empty")}), kExitUsage);
    EXPECT_EQ(cli({"reward", "--input", at("missing.jsonl")}), kExitRuntime);
}

TEST_F(Cli, GenDeterministicAcrossThreads) {
    ASSERT_EQ(cli({"gen", "--count", "40", "--seed", "7", "--threads", "1", "--out", at("a")}), kExitOk);
    ASSERT_EQ(cli({"gen", "--count", "40", "--seed", "7", "--threads", "4", "--out", at("b")}), kExitOk);
    EXPECT_EQ(count_lines(at("a/series.jsonl")), 40u);
    EXPECT_EQ(slurp(at("a/series.jsonl")), slurp(at("b/series.jsonl")));
    EXPECT_EQ(slurp(at("a/images/ts000039.png")), slurp(at("b/images/ts000039.png")));
    ASSERT_EQ(cli({"gen", "--count", "40", "--seed", "8", "--no-images", "--out", at("c")}), kExitOk);
    EXPECT_NE(slurp(at("a/series.jsonl")), slurp(at("c/series.jsonl")));
    EXPECT_FALSE(fs::exists(at("c/images/ts000000.png")));
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
    {
        std::ofstream cfg(at("cfg.json"));
        cfg << R"({"seed": 3, "count": 5, "gen": {"ts_length": 120}})";
    }
    ASSERT_EQ(cli({"gen", "--config", at("cfg.json"), "--count", "2", "--no-images", "--out", at("g")}), kExitOk);
    EXPECT_EQ(count_lines(at("g/series.jsonl")), 2u);
    std::ifstream in(at("g/series.jsonl"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(Json::parse(line).at("values").size(), 120u);
    const auto resolved = Json::parse(slurp(at("g/resolved_config.json")));
    EXPECT_EQ(resolved.at("seed"), 3);
    {
        std::ofstream bad(at("bad.json"));
        bad << R"({"gen": {"no_such_key": 1}})";
    }
    EXPECT_EQ(cli({"gen", "--config", at("bad.json"), "--out", at("h")}), kExitUsage);
}

TEST_F(Cli, QaStages) {
    ASSERT_EQ(cli({"gen", "--count", "12", "--seed", "1", "--out", at("g")}), kExitOk);
    ASSERT_EQ(cli({"qa", "--data", at("g"), "--stage", "all", "--describe-count", "4", "--detect-count", "8"}), kExitOk);
    const auto manifest = at("g/qa/manifest.jsonl");
    EXPECT_EQ(count_lines(manifest), 12u);
    std::ifstream in(manifest);
    int describe = 0, detect = 0;
    for (std::string line; std::getline(in, line);) {
        const auto j = Json::parse(line);
        (j.at("stage") == "describe" ? describe : detect)++;
        EXPECT_TRUE(fs::exists(at("g/qa/" + j.at("image").get<std::string>())));
    }
    EXPECT_EQ(describe, 4);
    EXPECT_EQ(detect, 8);
    ASSERT_EQ(cli({"qa", "--data", at("g"), "--stage", "detect", "--count", "3", "--out", at("q2")}), kExitOk);
    EXPECT_EQ(count_lines(at("q2/manifest.jsonl")), 3u);
    EXPECT_EQ(cli({"qa", "--data", at("g"), "--stage", "detect", "--count", "30", "--out", at("q3")}), kExitUsage);
}

TEST_F(Cli, RewardBatch) {
    {
        std::ofstream f(at("in.jsonl"));
        for (int i = 0; i < 5; ++i)
            f << R"({"response": "<think>ok</think> boxed{[[3, 9]]}", "intervals": [[3, 9]], "window_len": 200})" << "\n";
    }
    ASSERT_EQ(cli({"reward", "--input", at("in.jsonl"), "--output", at("out.jsonl")}), kExitOk);
    std::ifstream in(at("out.jsonl"));
    int n = 0;
    for (std::string line; std::getline(in, line); ++n) EXPECT_DOUBLE_EQ(Json::parse(line).at("reward").get<double>(), 1.0);
    EXPECT_EQ(n, 5);

    std::ofstream(at("empty.jsonl")).close();
    ASSERT_EQ(cli({"reward", "--input", at("empty.jsonl"), "--output", at("empty.out.jsonl")}), kExitOk);
    EXPECT_EQ(count_lines(at("empty.out.jsonl")), 0u);

    {
        std::ofstream f(at("neg.jsonl"));
        f << R"({"response": "<think>ok</think> boxed{[[1, 2]]}", "intervals": [], "window_len": 200})" << "\n";
    }
    ASSERT_EQ(cli({"reward", "--input", at("neg.jsonl"), "--output", at("neg.out.jsonl"), "--no-negative-reward"}),
              kExitOk);
    const auto j = Json::parse(slurp(at("neg.out.jsonl")));
    EXPECT_DOUBLE_EQ(j.at("f1_reward").get<double>(), 0.0);
    EXPECT_NEAR(j.at("reward").get<double>(), 0.1, 1e-12);
}

TEST_F(Cli, EvalOracleAndReplay) {
    ASSERT_EQ(cli({"gen", "--count", "20", "--seed", "2", "--no-images", "--out", at("g")}), kExitOk);
    ASSERT_EQ(cli({"eval", "--oracle", "--dataset", at("g"), "--out", at("e1")}), kExitOk);
    const auto report = Json::parse(slurp(at("e1/report.json")));
    EXPECT_DOUBLE_EQ(report.at("f1").get<double>(), 1.0);
    EXPECT_EQ(report.at("n_windows"), 20);
    ASSERT_EQ(cli({"eval", "--replay", at("e1/responses.jsonl"), "--dataset", at("g"), "--out", at("e2")}), kExitOk);
    EXPECT_EQ(slurp(at("e1/report.json")), slurp(at("e2/report.json")));
    ASSERT_EQ(cli({"eval", "--empty", "--dataset", at("g"), "--out", at("e3")}), kExitOk);
    EXPECT_DOUBLE_EQ(Json::parse(slurp(at("e3/report.json"))).at("recall").get<double>(), 0.0);
}

TEST_F(Cli, EvalCsvDatasetWindowCounts) {
    fs::create_directories(at("root/yahoo"));
    for (int s = 0; s < 3; ++s) {
        std::ofstream f(at(fmt::format("root/yahoo/s{}.csv", s)));
        f << "value,label\n";
        const int n = 400 + 100 * s;
        for (int i = 0; i < n; ++i) f << std::sin(i * 0.1) << "," << (i % 97 == 5) << "\n";
    }
    ASSERT_EQ(cli({"eval", "--oracle", "--data-root", at("root"), "--dataset", "yahoo", "--window", "100", "--step",
                   "100", "--canonical", "200", "--out", at("e")}),
              kExitOk);
    // Test split keeps the last half: 200, 250, 300 points -> 2 + 3 + 3 windows.
    const auto report = Json::parse(slurp(at("e/report.json")));
    EXPECT_EQ(report.at("n_windows"), 8);
    EXPECT_DOUBLE_EQ(report.at("f1").get<double>(), 1.0);
}

TEST_F(Cli, DiversityAndSlice) {
    ASSERT_EQ(cli({"gen", "--count", "30", "--seed", "4", "--no-images", "--out", at("g")}), kExitOk);
    ASSERT_EQ(cli({"diversity", "--data", at("g"), "--pairs", "100", "--seed", "1"}), kExitOk);
    const auto csv = slurp(at("g/diversity_cdf.csv"));
    EXPECT_EQ(csv.rfind("distance,cumulative_fraction\n", 0), 0u);
    EXPECT_EQ(cli({"diversity", "--data", at("g"), "--pairs", "1000"}), kExitUsage);

    {
        std::ofstream f(at("one.csv"));
        for (int i = 0; i < 450; ++i) f << i << "," << (i == 3) << "\n";
    }
    ASSERT_EQ(cli({"slice", "--input", at("one.csv"), "--out", at("w")}), kExitOk);
    EXPECT_TRUE(fs::exists(at("w/one_00000250.csv")));
    EXPECT_EQ(count_lines(at("w/one_00000000.csv")), 201u);
}

TEST(CliBinary, ExitCodesFromProcess) {
    const char* bin = std::getenv("TSVLM_CLI");
    if (!bin) GTEST_SKIP() << "TSVLM_CLI not set";
    const std::string b = bin;
    const auto run = [](const std::string& cmd) {
        const int st = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    };
    EXPECT_EQ(run(b + " --help"), 0);
    EXPECT_EQ(run(b + " gen --length -5"), 2);
    const auto dir = (fs::temp_directory_path() / "tsvlm_cli_proc").string();
    EXPECT_EQ(run(b + " gen --count 0 --out " + dir), 0);
    fs::remove_all(dir);
}
