// SPDX-License-Identifier: Apache-2.0
#include "tsvlm/reward.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include "json.hpp"

#include "tsvlm/error.hpp"

namespace tsvlm {

namespace {

std::vector<char> mask_of(std::span<const Segment> segs, int window_len, const char* which) {
    std::vector<char> m(static_cast<std::size_t>(window_len), 0);
    for (const auto& s : segs) {
        if (s.start < 0 || s.end < s.start || s.end >= window_len)
            throw InvalidArgument(fmt::format("{} interval [{}, {}] outside window of length {}", which, s.start, s.end,
                                              window_len));
        std::fill(m.begin() + s.start, m.begin() + s.end + 1, 1);
    }
    return m;
}

} // namespace

void RewardConfig::validate() const {
    if (std::abs(w_f1 + w_format - 1.0) > 1e-9)
        throw InvalidArgument(fmt::format("w_f1 + w_format must be 1, got {}", w_f1 + w_format));
    if (w_f1 < 0.0 || w_format < 0.0) throw InvalidArgument("reward weights must be non-negative");
    if (negative_reward_enabled && !(empty_correct > 0.0 && empty_wrong <= 0.0))
        throw InvalidArgument("empty_correct must be positive and empty_wrong non-positive");
}

double interval_f1(std::span<const Segment> pred, std::span<const Segment> real, int window_len) {
    if (window_len < 1) throw InvalidArgument("window_len must be positive");
    if (real.empty()) throw InvalidArgument("interval_f1 needs a non-empty ground truth");
    const auto p = mask_of(pred, window_len, "predicted");
    const auto r = mask_of(real, window_len, "real");
    long tp = 0, fp = 0, fn = 0;
    for (int i = 0; i < window_len; ++i) {
        if (p[i] && r[i]) ++tp;
        else if (p[i]) ++fp;
        else if (r[i]) ++fn;
    }
    if (tp == 0) return 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

double f1_reward(const std::optional<PredictedIntervals>& pred, std::span<const Segment> real, int window_len,
                 const RewardConfig& cfg) {
    if (real.empty()) {
        if (!cfg.negative_reward_enabled) return 0.0;
        return pred && pred->intervals.empty() ? cfg.empty_correct : cfg.empty_wrong;
    }
    if (!pred) return 0.0;
    std::vector<Segment> clamped;
    clamped.reserve(pred->intervals.size());
    for (auto s : pred->intervals) {
        s.start = std::clamp(s.start, 0, window_len - 1);
        s.end = std::clamp(s.end, 0, window_len - 1);
        if (s.start > s.end) std::swap(s.start, s.end);
        clamped.push_back(s);
    }
    return interval_f1(clamped, real, window_len);
}

RewardBreakdown combined_reward(std::string_view response, std::span<const Segment> real, int window_len,
                                const RewardConfig& cfg) {
    RewardBreakdown b;
    b.f1_reward = f1_reward(try_parse_boxed_intervals(response, std::max(window_len, 1)), real, window_len, cfg);
    b.format_reward = check_format(response);
    b.reward = cfg.w_f1 * b.f1_reward + cfg.w_format * b.format_reward;
    return b;
}

BatchSummary score_batch(std::istream& in, std::ostream& out, const RewardConfig& cfg) {
    cfg.validate();
    BatchSummary summary;
    double total = 0.0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        RewardBreakdown b;
        try {
            const auto j = nlohmann::json::parse(line);
            const std::string response = j.at("response").get<std::string>();
            const int window_len = j.at("window_len").get<int>();
            if (window_len < 1) throw InvalidArgument("window_len must be positive");
            std::vector<Segment> real;
            for (const auto& iv : j.at("intervals")) {
                if (!iv.is_array() || iv.size() != 2) throw InvalidArgument("interval must be a [start, end] pair");
                real.push_back({iv[0].get<int>(), iv[1].get<int>()});
            }
            b = combined_reward(response, real, window_len, cfg);
        } catch (const std::exception&) {
            ++summary.malformed;
            b = {};
            b.f1_reward = f1_reward(std::nullopt, {}, 1, cfg);
            b.reward = cfg.w_f1 * b.f1_reward;
        }
        nlohmann::ordered_json o;
        o["reward"] = b.reward;
        o["f1_reward"] = b.f1_reward;
        o["format_reward"] = b.format_reward;
        out << o.dump() << '\n';
        total += b.reward;
        ++summary.lines;
    }
    if (summary.lines) summary.mean_reward = total / static_cast<double>(summary.lines);
    return summary;
}

} // namespace tsvlm
