// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tsvlm {

// Inclusive, 0-based index range.
struct Segment {
    int start = 0;
    int end = 0;

    int length() const { return end - start + 1; }
    bool overlaps(const Segment& o) const { return start <= o.end && o.start <= end; }
    friend bool operator==(const Segment&, const Segment&) = default;
};

enum class TrendKind { Increase, Decrease, Steady };
enum class TrendShape { Linear, Exponential, Logarithmic, PiecewiseLinear };

struct TrendKnot {
    double x = 0.0;  // fraction of the series, strictly inside (0, 1)
    double y = 0.0;  // fraction of the displacement reached at x, in [0, 1]
    friend bool operator==(const TrendKnot&, const TrendKnot&) = default;
};

struct TrendSpec {
    TrendKind kind = TrendKind::Steady;
    TrendShape shape = TrendShape::Linear;
    // Total displacement as a multiple of the seasonal amplitude.
    double intensity = 0.0;
    // Interior knots, piecewise-linear shape only.
    std::vector<TrendKnot> knots;
    friend bool operator==(const TrendSpec&, const TrendSpec&) = default;
};

enum class PeriodClass { Observable, SubWindow };

struct Harmonic {
    int n = 1;
    double phase = 0.0;
    double perturb_depth = 0.0;
    double perturb_freq = 1.0;
    double perturb_phase = 0.0;
    friend bool operator==(const Harmonic&, const Harmonic&) = default;
};

struct SeasonalSpec {
    double period = 100.0;
    PeriodClass period_class = PeriodClass::Observable;
    double amplitude_series = 1.0;
    int num_harmonics = 1;
    std::vector<Harmonic> harmonics;

    double base_frequency() const { return 1.0 / period; }
    friend bool operator==(const SeasonalSpec&, const SeasonalSpec&) = default;
};

enum class NoiseLevel { Low, High };

struct NoiseSpec {
    NoiseLevel level = NoiseLevel::Low;
    double sigma = 0.0;
    friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

enum class AnomalyKind { Spike, Level, Trend, Frequency };

enum class AnomalySubtype {
    // spike
    UpwardSpike,
    DownwardSpike,
    ContinuousUpwardSpike,
    ContinuousDownwardSpike,
    UpwardConvex,
    DownwardConvex,
    RapidRiseSlowDecline,
    SlowRiseRapidDecline,
    // level
    SuddenIncrease,
    SuddenDecrease,
    IncreaseAfterDownwardSpike,
    DecreaseAfterUpwardSpike,
    IncreaseAfterUpwardSpike,
    // trend
    NewTrendSegment,
    // frequency
    LowFrequencyPerturbation,
};

inline constexpr int kNumSubtypes = 15;

struct AnomalySpec {
    AnomalyKind kind = AnomalyKind::Spike;
    AnomalySubtype subtype = AnomalySubtype::UpwardSpike;
    int start = 0;
    int duration = 1;
    // Spike/level/trend: size in series units (direction comes from the
    // subtype). Frequency: amplitude scale of the perturbed harmonics.
    double magnitude = 1.0;
    // Frequency kind only.
    double freq_scale = 1.0;
    int harmonics_perturbed = 1;
    // Trend kind only: shape of the inserted segment. Its displacement is
    // segment_trend.intensity * magnitude.
    TrendSpec segment_trend;
    friend bool operator==(const AnomalySpec&, const AnomalySpec&) = default;
};

struct AnomalyInterval {
    int start = 0;
    int end = 0;
    AnomalyKind kind = AnomalyKind::Spike;
    AnomalySubtype subtype = AnomalySubtype::UpwardSpike;

    Segment segment() const { return {start, end}; }
    friend bool operator==(const AnomalyInterval&, const AnomalyInterval&) = default;
};

struct SeriesSpec {
    std::uint64_t seed = 0;
    int ts_length = 200;
    TrendSpec trend;
    SeasonalSpec seasonal;
    NoiseSpec noise;
    std::vector<AnomalySpec> anomaly_plan;
    friend bool operator==(const SeriesSpec&, const SeriesSpec&) = default;
};

struct SeriesAttributes {
    TrendKind trend = TrendKind::Steady;
    double period = 0.0;
    PeriodClass period_class = PeriodClass::Observable;
    NoiseLevel noise = NoiseLevel::Low;
    // Peak-to-peak of the realized seasonal component, series units.
    double seasonal_peak_to_peak = 0.0;
    friend bool operator==(const SeriesAttributes&, const SeriesAttributes&) = default;
};

struct LabeledSeries {
    std::vector<double> values;
    std::vector<AnomalyInterval> intervals;  // sorted by start
    SeriesAttributes attributes;

    int length() const { return static_cast<int>(values.size()); }
    std::vector<Segment> segments() const;
};

std::string_view to_string(TrendKind v);
std::string_view to_string(TrendShape v);
std::string_view to_string(PeriodClass v);
std::string_view to_string(NoiseLevel v);
std::string_view to_string(AnomalyKind v);
std::string_view to_string(AnomalySubtype v);

// Throws InvalidArgument on unknown names.
TrendKind trend_kind_from_string(std::string_view s);
TrendShape trend_shape_from_string(std::string_view s);
PeriodClass period_class_from_string(std::string_view s);
NoiseLevel noise_level_from_string(std::string_view s);
AnomalyKind anomaly_kind_from_string(std::string_view s);
AnomalySubtype anomaly_subtype_from_string(std::string_view s);

AnomalyKind kind_of(AnomalySubtype s);
std::vector<AnomalySubtype> subtypes_of(AnomalyKind k);

} // namespace tsvlm
