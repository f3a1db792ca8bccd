// SPDX-License-Identifier: Apache-2.0
#include "tsvlm/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "tsvlm/error.hpp"
#include "tsvlm/render.hpp"
#include "tsvlm/rng.hpp"

namespace tsvlm {

namespace {

// Maximal runs of positive labels.
std::vector<Segment> label_segments(std::span<const int> labels) {
    std::vector<Segment> out;
    const int n = static_cast<int>(labels.size());
    for (int i = 0; i < n;) {
        if (!labels[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < n && labels[j + 1]) ++j;
        out.push_back({i, j});
        i = j + 1;
    }
    return out;
}

void accumulate(ThresholdCounts& c, std::span<const int> scores, std::span<const int> labels,
                std::span<const Segment> segments, int tau, bool adjust) {
    const int n = static_cast<int>(scores.size());
    for (int i = 0; i < n; ++i)
        if (!labels[i] && scores[i] >= tau) ++c.fp;
    for (const auto& s : segments) {
        long hits = 0;
        for (int i = s.start; i <= s.end; ++i) hits += scores[i] >= tau;
        const long len = s.length();
        if (adjust && hits > 0) hits = len;
        c.tp += hits;
        c.fn += len - hits;
    }
}

void check_lengths(std::span<const int> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw InvalidArgument(fmt::format("scores ({}) and labels ({}) differ in length", scores.size(), labels.size()));
}

} // namespace

int WindowPlan::canonical_length() const {
    if (canonical_override) return *canonical_override;
    return static_cast<int>(std::lround(window * resize_factor));
}

double WindowPlan::rescale_factor() const {
    return static_cast<double>(canonical_length()) / static_cast<double>(window);
}

void WindowPlan::validate() const {
    if (window < 1 || step < 1) throw InvalidArgument("window and step must be positive");
    if (step > window) throw InvalidArgument(fmt::format("step {} exceeds window {}: points would be skipped", step, window));
    if (!(resize_factor > 0.0) || !std::isfinite(resize_factor)) throw InvalidArgument("resize_factor must be positive");
    if (canonical_length() < 1) throw InvalidArgument("canonical length must be positive");
}

std::vector<int> window_offsets(int series_length, const WindowPlan& plan) {
    plan.validate();
    if (series_length < plan.window)
        throw InvalidArgument(fmt::format("series of length {} is shorter than window {}", series_length, plan.window));
    std::vector<int> offsets;
    int off = 0;
    for (; off + plan.window <= series_length; off += plan.step) offsets.push_back(off);
    if (offsets.back() + plan.window < series_length) offsets.push_back(series_length - plan.window);
    return offsets;
}

std::vector<Window> slice_windows(std::span<const double> series, std::span<const int> labels,
                                  const WindowPlan& plan) {
    if (!labels.empty() && labels.size() != series.size())
        throw InvalidArgument("labels must be empty or match the series length");
    std::vector<Window> out;
    for (int off : window_offsets(static_cast<int>(series.size()), plan)) {
        Window w;
        w.offset = off;
        w.values.assign(series.begin() + off, series.begin() + off + plan.window);
        if (!labels.empty()) w.labels.assign(labels.begin() + off, labels.begin() + off + plan.window);
        out.push_back(std::move(w));
    }
    return out;
}

std::vector<Segment> map_intervals(std::span<const Segment> intervals, double factor, MapDirection direction,
                                   std::optional<int> max_index) {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw InvalidArgument("map factor must be positive");
    const double k = direction == MapDirection::ToCanonical ? factor : 1.0 / factor;
    const double hi = max_index ? static_cast<double>(*max_index) : 2147483647.0;
    const auto map = [&](int v) { return static_cast<int>(std::clamp(std::round(v * k), 0.0, hi)); };
    std::vector<Segment> out;
    out.reserve(intervals.size());
    for (const auto& s : intervals) {
        Segment m{map(s.start), map(s.end)};
        if (m.start > m.end) m.end = m.start;
        out.push_back(m);
    }
    return out;
}

std::vector<int> vote_scores(std::span<const WindowPrediction> predictions, int series_length) {
    if (series_length < 0) throw InvalidArgument("series_length must be non-negative");
    std::vector<int> scores(static_cast<std::size_t>(series_length), 0);
    for (const auto& p : predictions) {
        if (p.offset < 0 || p.length < 0 || p.offset + p.length > series_length)
            throw InvalidArgument(fmt::format("window [{}, {}) outside series of length {}", p.offset,
                                              p.offset + p.length, series_length));
        // Overlapping intervals inside one window still cast a single vote.
        std::vector<char> flagged(static_cast<std::size_t>(p.length), 0);
        for (const auto& s : p.intervals) {
            if (s.start < 0 || s.end < s.start || s.end >= p.length)
                throw InvalidArgument(fmt::format("interval [{}, {}] outside window of length {}", s.start, s.end,
                                                  p.length));
            std::fill(flagged.begin() + s.start, flagged.begin() + s.end + 1, 1);
        }
        for (int i = 0; i < p.length; ++i) scores[p.offset + i] += flagged[i];
    }
    return scores;
}

double ThresholdCounts::precision() const { return tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0; }
double ThresholdCounts::recall() const { return tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0; }
// Integer form of 2PR/(P+R): equal ratios give identical doubles, so ties
// in the threshold sweep are exact.
double ThresholdCounts::f1() const {
    return tp ? static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn) : 0.0;
}

ThresholdCounts evaluate_threshold(std::span<const int> scores, std::span<const int> labels, int tau, bool adjust) {
    check_lengths(scores, labels);
    ThresholdCounts c;
    accumulate(c, scores, labels, label_segments(labels), tau, adjust);
    return c;
}

EvalReport point_adjusted_best_f1(std::span<const ScoredSeries> series) {
    std::set<int> taus;
    std::vector<std::vector<Segment>> segments;
    segments.reserve(series.size());
    EvalReport report;
    for (const auto& s : series) {
        check_lengths(s.scores, s.labels);
        for (int v : s.scores)
            if (v > 0) taus.insert(v);
        segments.push_back(label_segments(s.labels));
        report.n_points += static_cast<long>(s.scores.size());
    }
    report.n_series = static_cast<int>(series.size());
    double best = -1.0;
    for (int tau : taus) {
        ThresholdCounts c;
        for (std::size_t i = 0; i < series.size(); ++i)
            accumulate(c, series[i].scores, series[i].labels, segments[i], tau, true);
        const double f1 = c.f1();
        if (f1 > best) {
            best = f1;
            report.precision = c.precision();
            report.recall = c.recall();
            report.f1 = f1;
            report.threshold = tau;
        }
    }
    return report;
}

EvalReport point_adjusted_best_f1(std::span<const int> scores, std::span<const int> labels) {
    check_lengths(scores, labels);
    const ScoredSeries one{{scores.begin(), scores.end()}, {labels.begin(), labels.end()}};
    return point_adjusted_best_f1(std::span<const ScoredSeries>(&one, 1));
}

void add_per_kind(EvalReport& report, std::span<const int> scores, std::span<const AnomalyInterval> truth) {
    for (const auto& iv : truth) {
        if (iv.start < 0 || iv.end >= static_cast<int>(scores.size()))
            throw InvalidArgument("typed interval outside the scored series");
        auto& k = report.per_kind[std::string(to_string(iv.kind))];
        ++k.segments;
        for (int i = iv.start; i <= iv.end; ++i)
            if (scores[i] >= report.threshold) {
                ++k.detected;
                break;
            }
    }
}

double dtw_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("dtw_distance needs non-empty inputs");
    const std::size_t m = b.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = inf;
        for (std::size_t j = 1; j <= m; ++j) {
            const double cost = std::abs(a[i - 1] - b[j - 1]);
            cur[j] = cost + std::min({prev[j - 1], prev[j], cur[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

std::vector<CdfPoint> diversity_cdf(const std::vector<std::vector<double>>& series_set, int n_pairs,
                                    std::uint64_t seed) {
    const auto m = static_cast<std::int64_t>(series_set.size());
    if (m < 2) throw InvalidArgument("diversity_cdf needs at least two series");
    if (n_pairs < 1) throw InvalidArgument("n_pairs must be positive");
    const std::int64_t available = m * (m - 1) / 2;
    if (n_pairs > available)
        throw InvalidArgument(fmt::format("{} pairs requested but only {} distinct pairs exist", n_pairs, available));

    std::vector<std::vector<double>> z;
    z.reserve(series_set.size());
    for (const auto& s : series_set) z.push_back(s.size() >= 2 ? zscore(s) : std::vector<double>(s.size(), 0.0));

    Rng rng(seed);
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    if (available <= 4 * static_cast<std::int64_t>(n_pairs)) {
        // Dense request: partial Fisher-Yates over the enumerated pairs.
        for (std::int64_t i = 0; i < m; ++i)
            for (std::int64_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
        for (int k = 0; k < n_pairs; ++k) {
            const auto r = rng.uniform_int(k, static_cast<std::int64_t>(pairs.size()) - 1);
            std::swap(pairs[k], pairs[r]);
        }
        pairs.resize(n_pairs);
    } else {
        std::set<std::pair<std::int64_t, std::int64_t>> seen;
        while (static_cast<int>(pairs.size()) < n_pairs) {
            auto i = rng.uniform_int(0, m - 1), j = rng.uniform_int(0, m - 1);
            if (i == j) continue;
            if (i > j) std::swap(i, j);
            if (seen.emplace(i, j).second) pairs.emplace_back(i, j);
        }
    }

    std::vector<double> d;
    d.reserve(pairs.size());
    for (const auto& [i, j] : pairs) d.push_back(dtw_distance(z[i], z[j]));
    std::sort(d.begin(), d.end());
    std::vector<CdfPoint> cdf;
    const double n = static_cast<double>(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        if (i + 1 == d.size() || d[i + 1] != d[i]) cdf.push_back({d[i], static_cast<double>(i + 1) / n});
    return cdf;
}

std::vector<int> labels_from_intervals(std::span<const AnomalyInterval> intervals, int length) {
    std::vector<int> labels(static_cast<std::size_t>(std::max(length, 0)), 0);
    for (const auto& iv : intervals) {
        if (iv.start < 0 || iv.end >= length || iv.start > iv.end)
            throw InvalidArgument(fmt::format("interval [{}, {}] outside series of length {}", iv.start, iv.end, length));
        std::fill(labels.begin() + iv.start, labels.begin() + iv.end + 1, 1);
    }
    return labels;
}

} // namespace tsvlm
