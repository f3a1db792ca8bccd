// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "tsvlm/error.hpp"
#include "tsvlm/reward.hpp"
#include "tsvlm/rng.hpp"

using namespace tsvlm;

namespace {

using Segs = std::vector<Segment>;

// Per-point confusion counts, no shared code with the library.
double brute_f1(const Segs& pred, const Segs& real, int n) {
    int tp = 0, fp = 0, fn = 0;
    for (int t = 0; t < n; ++t) {
        bool p = false, r = false;
        for (const auto& s : pred) p = p || (s.start <= t && t <= s.end);
        for (const auto& s : real) r = r || (s.start <= t && t <= s.end);
        tp += p && r;
        fp += p && !r;
        fn += !p && r;
    }
    if (tp == 0) return 0.0;
    const double prec = double(tp) / (tp + fp), rec = double(tp) / (tp + fn);
    return 2 * prec * rec / (prec + rec);
}

Segs random_segments(Rng& rng, int n, int max_count) {
    Segs out;
    const int count = static_cast<int>(rng.uniform_int(0, max_count));
    for (int i = 0; i < count; ++i) {
        int a = static_cast<int>(rng.uniform_int(0, n - 1)), b = static_cast<int>(rng.uniform_int(0, n - 1));
        if (a > b) std::swap(a, b);
        out.push_back({a, b});
    }
    return out;
}

PredictedIntervals pred_of(Segs s) { return PredictedIntervals{std::move(s), ""}; }

} // namespace

TEST(IntervalF1, Examples) {
    EXPECT_DOUBLE_EQ(interval_f1(Segs{{10, 19}}, Segs{{10, 19}}, 200), 1.0);
    EXPECT_DOUBLE_EQ(interval_f1(Segs{{10, 19}}, Segs{{15, 24}}, 200), 0.5);
    EXPECT_DOUBLE_EQ(interval_f1(Segs{}, Segs{{0, 9}}, 200), 0.0);
    EXPECT_THROW(interval_f1(Segs{{0, 1}}, Segs{}, 200), InvalidArgument);
    EXPECT_THROW(interval_f1(Segs{{0, 200}}, Segs{{0, 1}}, 200), InvalidArgument);
    EXPECT_THROW(interval_f1(Segs{{0, 1}}, Segs{{-1, 1}}, 200), InvalidArgument);
}

TEST(IntervalF1, MatchesBruteForceOnSmallWindows) {
    Rng rng(31);
    for (int n = 1; n <= 32; ++n) {
        for (int trial = 0; trial < 200; ++trial) {
            const auto real = random_segments(rng, n, 3);
            if (real.empty()) continue;
            const auto pred = random_segments(rng, n, 3);
            ASSERT_NEAR(interval_f1(pred, real, n), brute_f1(pred, real, n), 1e-12);
        }
    }
}

TEST(F1Reward, CaseTable) {
    const RewardConfig cfg;
    EXPECT_DOUBLE_EQ(f1_reward(pred_of({}), Segs{}, 200, cfg), 0.5);
    EXPECT_DOUBLE_EQ(f1_reward(pred_of({{1, 2}}), Segs{}, 200, cfg), -0.5);
    EXPECT_DOUBLE_EQ(f1_reward(std::nullopt, Segs{}, 200, cfg), -0.5);
    EXPECT_DOUBLE_EQ(f1_reward(std::nullopt, Segs{{3, 9}}, 200, cfg), 0.0);
    EXPECT_DOUBLE_EQ(f1_reward(pred_of({{10, 19}}), Segs{{15, 24}}, 200, cfg), 0.5);
    RewardConfig off;
    off.negative_reward_enabled = false;
    for (const auto& p : {std::optional<PredictedIntervals>{pred_of({})}, std::optional<PredictedIntervals>{pred_of({{1, 2}})},
                          std::optional<PredictedIntervals>{}})
        EXPECT_DOUBLE_EQ(f1_reward(p, Segs{}, 200, off), 0.0);
}

TEST(CombinedReward, Examples) {
    EXPECT_DOUBLE_EQ(combined_reward("<think>r</think> boxed{[[10, 19]]}", Segs{{10, 19}}, 200).reward, 1.0);
    EXPECT_NEAR(combined_reward("<think>r</think> boxed{[]}", Segs{}, 200).reward, 0.55, 1e-12);
    const auto bad = combined_reward("boxed{[[1,2]]}", Segs{}, 200);
    EXPECT_NEAR(bad.reward, -0.45, 1e-12);
    EXPECT_EQ(bad.format_reward, 0);
    EXPECT_DOUBLE_EQ(bad.f1_reward, -0.5);
}

TEST(CombinedReward, RangeAndAblationEquivalence) {
    Rng rng(37);
    RewardConfig off;
    off.negative_reward_enabled = false;
    for (int trial = 0; trial < 3000; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(1, 60));
        const auto real = random_segments(rng, n, 2);
        const auto pred = random_segments(rng, n, 3);
        std::string text = (rng.bernoulli(0.5) ? "<think>x</think> " : "") + to_boxed(pred);
        if (rng.bernoulli(0.1)) text = "garbage";
        const auto r = combined_reward(text, real, n);
        ASSERT_GE(r.reward, -0.45 - 1e-12);
        ASSERT_LE(r.reward, 1.0 + 1e-12);
        if (r.reward > 1.0 - 1e-12) {
            ASSERT_EQ(r.format_reward, 1);
            ASSERT_FALSE(real.empty());
        }
        if (!real.empty()) ASSERT_EQ(combined_reward(text, real, n, off).reward, r.reward);
    }
}

TEST(F1Reward, MonotoneInTruePositiveGrowth) {
    Rng rng(41);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = 60;
        const int s = static_cast<int>(rng.uniform_int(0, 40)), len = static_cast<int>(rng.uniform_int(2, 19));
        const Segs real{{s, s + len}};
        double prev = -1.0;
        for (int grow = 0; grow <= len; ++grow) {
            const double f = f1_reward(pred_of({{s, s + grow}}), real, n);
            ASSERT_GE(f, prev - 1e-12);
            prev = f;
        }
    }
}

TEST(RewardConfig, Validation) {
    RewardConfig c;
    EXPECT_NO_THROW(c.validate());
    c.w_f1 = 0.8;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = RewardConfig{};
    c.empty_wrong = 0.1;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c.negative_reward_enabled = false;
    EXPECT_NO_THROW(c.validate());
}

TEST(ScoreBatch, JsonlRoundTrip) {
    std::istringstream in(
        "{\"response\": \"<think>a</think> boxed{[[10, 19]]}\", \"intervals\": [[10, 19]], \"window_len\": 200}\n"
        "{\"response\": \"<think>a</think> boxed{[]}\", \"intervals\": [], \"window_len\": 200}\n"
        "not json\n"
        "{\"response\": \"boxed{[[1,2]]}\", \"intervals\": [], \"window_len\": 50}\n");
    std::ostringstream out;
    const auto summary = score_batch(in, out);
    EXPECT_EQ(summary.lines, 4u);
    EXPECT_EQ(summary.malformed, 1u);
    std::istringstream lines(out.str());
    std::vector<double> rewards;
    for (std::string line; std::getline(lines, line);) rewards.push_back(nlohmann::json::parse(line).at("reward"));
    ASSERT_EQ(rewards.size(), 4u);
    EXPECT_DOUBLE_EQ(rewards[0], 1.0);
    EXPECT_NEAR(rewards[1], 0.55, 1e-12);
    EXPECT_NEAR(rewards[2], -0.45, 1e-12);
    EXPECT_NEAR(rewards[3], -0.45, 1e-12);
    EXPECT_NEAR(summary.mean_reward, (1.0 + 0.55 - 0.45 - 0.45) / 4.0, 1e-12);
}
