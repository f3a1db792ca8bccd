// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>

#include "tsvlm/parsefmt.hpp"
#include "tsvlm/types.hpp"

namespace tsvlm {

struct RewardConfig {
    double w_f1 = 0.9;
    double w_format = 0.1;
    double empty_correct = 0.5;
    double empty_wrong = -0.5;
    // When false, anomaly-free windows score like any other window: F1 = 0.
    bool negative_reward_enabled = true;

    void validate() const;
    friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

// Point-level F1 between two interval sets over a window of window_len
// points. `real` must be non-empty.
double interval_f1(std::span<const Segment> pred, std::span<const Segment> real, int window_len);

// nullopt stands for an unparseable response.
double f1_reward(const std::optional<PredictedIntervals>& pred, std::span<const Segment> real, int window_len,
                 const RewardConfig& cfg = {});

struct RewardBreakdown {
    double reward = 0.0;
    double f1_reward = 0.0;
    int format_reward = 0;
};

RewardBreakdown combined_reward(std::string_view response, std::span<const Segment> real, int window_len,
                                const RewardConfig& cfg = {});

struct BatchSummary {
    std::size_t lines = 0;
    std::size_t malformed = 0;
    double mean_reward = 0.0;
};

// JSONL in: {"response": str, "intervals": [[s, e], ...], "window_len": int}
// JSONL out: {"reward", "f1_reward", "format_reward"}, one line per input line.
// A line that cannot be decoded is scored as an unparseable response against
// an anomaly-free window of length 1.
BatchSummary score_batch(std::istream& in, std::ostream& out, const RewardConfig& cfg = {});

} // namespace tsvlm
