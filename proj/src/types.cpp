// SPDX-License-Identifier: Apache-2.0
#include "tsvlm/types.hpp"

#include <array>
#include <string>
#include <utility>

#include "tsvlm/error.hpp"

namespace tsvlm {

std::vector<Segment> LabeledSeries::segments() const {
    std::vector<Segment> out;
    out.reserve(intervals.size());
    for (const auto& iv : intervals) out.push_back(iv.segment());
    return out;
}

namespace {

template <typename E, std::size_t N>
using NameTable = std::array<std::pair<E, std::string_view>, N>;

constexpr NameTable<TrendKind, 3> kTrendKinds{{
    {TrendKind::Increase, "increase"},
    {TrendKind::Decrease, "decrease"},
    {TrendKind::Steady, "steady"},
}};

constexpr NameTable<TrendShape, 4> kTrendShapes{{
    {TrendShape::Linear, "linear"},
    {TrendShape::Exponential, "exponential"},
    {TrendShape::Logarithmic, "logarithmic"},
    {TrendShape::PiecewiseLinear, "piecewise-linear"},
}};

constexpr NameTable<PeriodClass, 2> kPeriodClasses{{
    {PeriodClass::Observable, "observable"},
    {PeriodClass::SubWindow, "sub-window"},
}};

constexpr NameTable<NoiseLevel, 2> kNoiseLevels{{
    {NoiseLevel::Low, "low"},
    {NoiseLevel::High, "high"},
}};

constexpr NameTable<AnomalyKind, 4> kKinds{{
    {AnomalyKind::Spike, "spike"},
    {AnomalyKind::Level, "level"},
    {AnomalyKind::Trend, "trend"},
    {AnomalyKind::Frequency, "frequency"},
}};

constexpr NameTable<AnomalySubtype, kNumSubtypes> kSubtypes{{
    {AnomalySubtype::UpwardSpike, "upward-spike"},
    {AnomalySubtype::DownwardSpike, "downward-spike"},
    {AnomalySubtype::ContinuousUpwardSpike, "continuous-upward-spike"},
    {AnomalySubtype::ContinuousDownwardSpike, "continuous-downward-spike"},
    {AnomalySubtype::UpwardConvex, "upward-convex"},
    {AnomalySubtype::DownwardConvex, "downward-convex"},
    {AnomalySubtype::RapidRiseSlowDecline, "rapid-rise-slow-decline"},
    {AnomalySubtype::SlowRiseRapidDecline, "slow-rise-rapid-decline"},
    {AnomalySubtype::SuddenIncrease, "sudden-increase"},
    {AnomalySubtype::SuddenDecrease, "sudden-decrease"},
    {AnomalySubtype::IncreaseAfterDownwardSpike, "increase-after-downward-spike"},
    {AnomalySubtype::DecreaseAfterUpwardSpike, "decrease-after-upward-spike"},
    {AnomalySubtype::IncreaseAfterUpwardSpike, "increase-after-upward-spike"},
    {AnomalySubtype::NewTrendSegment, "new-trend-segment"},
    {AnomalySubtype::LowFrequencyPerturbation, "low-frequency-perturbation"},
}};

template <typename E, std::size_t N>
std::string_view name_of(const NameTable<E, N>& table, E v) {
    for (const auto& [e, name] : table)
        if (e == v) return name;
    return "unknown";
}

template <typename E, std::size_t N>
E parse_name(const NameTable<E, N>& table, std::string_view s, const char* what) {
    for (const auto& [e, name] : table)
        if (name == s) return e;
    throw InvalidArgument(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

} // namespace

std::string_view to_string(TrendKind v) { return name_of(kTrendKinds, v); }
std::string_view to_string(TrendShape v) { return name_of(kTrendShapes, v); }
std::string_view to_string(PeriodClass v) { return name_of(kPeriodClasses, v); }
std::string_view to_string(NoiseLevel v) { return name_of(kNoiseLevels, v); }
std::string_view to_string(AnomalyKind v) { return name_of(kKinds, v); }
std::string_view to_string(AnomalySubtype v) { return name_of(kSubtypes, v); }

TrendKind trend_kind_from_string(std::string_view s) { return parse_name(kTrendKinds, s, "trend kind"); }
TrendShape trend_shape_from_string(std::string_view s) { return parse_name(kTrendShapes, s, "trend shape"); }
PeriodClass period_class_from_string(std::string_view s) { return parse_name(kPeriodClasses, s, "period class"); }
NoiseLevel noise_level_from_string(std::string_view s) { return parse_name(kNoiseLevels, s, "noise level"); }
AnomalyKind anomaly_kind_from_string(std::string_view s) { return parse_name(kKinds, s, "anomaly kind"); }
AnomalySubtype anomaly_subtype_from_string(std::string_view s) { return parse_name(kSubtypes, s, "anomaly subtype"); }

AnomalyKind kind_of(AnomalySubtype s) {
    switch (s) {
    case AnomalySubtype::UpwardSpike:
    case AnomalySubtype::DownwardSpike:
    case AnomalySubtype::ContinuousUpwardSpike:
    case AnomalySubtype::ContinuousDownwardSpike:
    case AnomalySubtype::UpwardConvex:
    case AnomalySubtype::DownwardConvex:
    case AnomalySubtype::RapidRiseSlowDecline:
    case AnomalySubtype::SlowRiseRapidDecline:
        return AnomalyKind::Spike;
    case AnomalySubtype::SuddenIncrease:
    case AnomalySubtype::SuddenDecrease:
    case AnomalySubtype::IncreaseAfterDownwardSpike:
    case AnomalySubtype::DecreaseAfterUpwardSpike:
    case AnomalySubtype::IncreaseAfterUpwardSpike:
        return AnomalyKind::Level;
    case AnomalySubtype::NewTrendSegment:
        return AnomalyKind::Trend;
    case AnomalySubtype::LowFrequencyPerturbation:
        return AnomalyKind::Frequency;
    }
    return AnomalyKind::Spike;
}

std::vector<AnomalySubtype> subtypes_of(AnomalyKind k) {
    std::vector<AnomalySubtype> out;
    for (const auto& [s, name] : kSubtypes)
        if (kind_of(s) == k) out.push_back(s);
    return out;
}

} // namespace tsvlm
