// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsvlm/types.hpp"

namespace tsvlm {

struct WindowPlan {
    int window = 200;
    int step = 200;
    double resize_factor = 1.0;
    // Replaces round(window * resize_factor) when set.
    std::optional<int> canonical_override;

    int canonical_length() const;
    // canonical_length / window
    double rescale_factor() const;
    void validate() const;
    friend bool operator==(const WindowPlan&, const WindowPlan&) = default;
};

struct Window {
    int offset = 0;
    std::vector<double> values;
    std::vector<int> labels;  // empty when the source carried no labels
};

// Windows at 0, step, 2*step, ...; a final window flush with the series end is
// appended when the stride leaves points uncovered. `labels` may be empty.
std::vector<Window> slice_windows(std::span<const double> series, std::span<const int> labels,
                                  const WindowPlan& plan);
std::vector<int> window_offsets(int series_length, const WindowPlan& plan);

enum class MapDirection { ToCanonical, ToOriginal };

// Scales endpoints by factor (to-canonical) or 1/factor (to-original),
// rounding half away from zero and clamping to [0, max_index] (max_index only
// bounds the upper end when given).
std::vector<Segment> map_intervals(std::span<const Segment> intervals, double factor, MapDirection direction,
                                   std::optional<int> max_index = std::nullopt);

struct WindowPrediction {
    int offset = 0;
    int length = 0;
    // Window-local original coordinates, each within [0, length).
    std::vector<Segment> intervals;
};

std::vector<int> vote_scores(std::span<const WindowPrediction> predictions, int series_length);

struct KindStats {
    int segments = 0;
    int detected = 0;
    double recall() const { return segments ? static_cast<double>(detected) / segments : 0.0; }
};

struct EvalReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int threshold = 1;
    int n_windows = 0;
    int n_series = 0;
    long n_points = 0;
    int n_failed = 0;    // windows without a response
    int n_unparsed = 0;  // responses without a usable boxed list
    // Segment-level detection at the chosen threshold, by anomaly kind. Only
    // filled when typed ground truth is known.
    std::map<std::string, KindStats> per_kind;
};

struct ThresholdCounts {
    long tp = 0, fp = 0, fn = 0;
    double precision() const;
    double recall() const;
    double f1() const;
};

// Confusion counts for predictions scores >= tau, optionally point-adjusted.
ThresholdCounts evaluate_threshold(std::span<const int> scores, std::span<const int> labels, int tau, bool adjust);

// Sweeps tau over the distinct positive vote values; ties keep the smallest tau.
// All-zero scores give P = R = F1 = 0 at tau = 1.
EvalReport point_adjusted_best_f1(std::span<const int> scores, std::span<const int> labels);

struct ScoredSeries {
    std::vector<int> scores;
    std::vector<int> labels;
};
// Adjustment is applied per series; the threshold is shared.
EvalReport point_adjusted_best_f1(std::span<const ScoredSeries> series);

// Fills report.per_kind from typed ground truth at report.threshold.
void add_per_kind(EvalReport& report, std::span<const int> scores, std::span<const AnomalyInterval> truth);

double dtw_distance(std::span<const double> a, std::span<const double> b);

struct CdfPoint {
    double distance = 0.0;
    double fraction = 0.0;
};

// Empirical CDF of DTW distances over n_pairs distinct unordered pairs of
// z-scored series.
std::vector<CdfPoint> diversity_cdf(const std::vector<std::vector<double>>& series_set, int n_pairs,
                                    std::uint64_t seed);
void write_cdf_csv(std::span<const CdfPoint> cdf, const std::filesystem::path& path);

// Labeled real-world series: directory `<name>/<series-id>.csv` with columns
// (timestamp optional, value, label).
struct DatasetSeries {
    std::string id;
    std::vector<double> values;
    std::vector<int> labels;
    std::vector<AnomalyInterval> typed;  // synthetic sources only
};

struct Dataset {
    std::string name;
    std::vector<DatasetSeries> series;
};

// Fraction of each series kept as the test split. yahoo: 0.5, kpi and wsd:
// 0.2, anything else 1.0.
double default_test_fraction(const std::string& dataset_name);

DatasetSeries read_series_csv(const std::filesystem::path& path);
// Series sorted by id; only the trailing test fraction of each is kept.
Dataset load_dataset(const std::filesystem::path& dir, std::optional<double> test_fraction = std::nullopt);

// Binary point labels from interval ground truth.
std::vector<int> labels_from_intervals(std::span<const AnomalyInterval> intervals, int length);

} // namespace tsvlm
