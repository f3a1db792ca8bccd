// SPDX-License-Identifier: Apache-2.0
#include "tsvlm/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "tsvlm/error.hpp"

namespace tsvlm {

namespace {

// Length of the spike that opens a spike-prefixed level shift.
constexpr int kLevelPrefix = 2;
constexpr int kPlacementRetries = 32;
constexpr int kEdgeMargin = 2;

double spike_direction(AnomalySubtype s) {
    switch (s) {
    case AnomalySubtype::DownwardSpike:
    case AnomalySubtype::ContinuousDownwardSpike:
    case AnomalySubtype::DownwardConvex:
        return -1.0;
    default:
        return 1.0;
    }
}

double level_direction(AnomalySubtype s) {
    switch (s) {
    case AnomalySubtype::SuddenDecrease:
    case AnomalySubtype::DecreaseAfterUpwardSpike:
        return -1.0;
    default:
        return 1.0;
    }
}

// Direction of the prefix spike, 0 when the level subtype has none.
double level_prefix_direction(AnomalySubtype s) {
    switch (s) {
    case AnomalySubtype::IncreaseAfterDownwardSpike:
        return -1.0;
    case AnomalySubtype::DecreaseAfterUpwardSpike:
    case AnomalySubtype::IncreaseAfterUpwardSpike:
        return 1.0;
    default:
        return 0.0;
    }
}

bool is_point_spike(AnomalySubtype s) {
    return s == AnomalySubtype::UpwardSpike || s == AnomalySubtype::DownwardSpike;
}

void check_no_conflict(const LabeledSeries& series, Segment seg) {
    for (const auto& iv : series.intervals) {
        if (iv.segment().overlaps(seg))
            throw ConflictError(fmt::format("anomaly [{}, {}] overlaps labeled interval [{}, {}]", seg.start, seg.end,
                                            iv.start, iv.end));
    }
}

void append_label(LabeledSeries& out, const AnomalySpec& spec, Segment seg) {
    out.intervals.push_back({seg.start, seg.end, spec.kind, spec.subtype});
    std::sort(out.intervals.begin(), out.intervals.end(),
              [](const AnomalyInterval& a, const AnomalyInterval& b) { return a.start < b.start; });
}

bool separated(Segment a, Segment b) {
    return a.start - b.end - 1 >= kAnomalySeparation || b.start - a.end - 1 >= kAnomalySeparation;
}

} // namespace

bool is_persistent(AnomalyKind k) {
    return k == AnomalyKind::Level || k == AnomalyKind::Trend;
}

Segment labeled_segment(const AnomalySpec& spec, int ts_length) {
    if (is_persistent(spec.kind)) return {spec.start, ts_length - 1};
    return {spec.start, spec.start + spec.duration - 1};
}

void validate_anomaly(const AnomalySpec& spec, int ts_length) {
    if (kind_of(spec.subtype) != spec.kind)
        throw InvalidArgument(fmt::format("subtype {} does not belong to kind {}", to_string(spec.subtype), to_string(spec.kind)));
    if (spec.start < 0 || spec.duration < 1 || spec.start > ts_length - spec.duration)
        throw InvalidArgument(fmt::format("anomaly interval start={} duration={} outside series of length {}", spec.start,
                                          spec.duration, ts_length));
    if (!std::isfinite(spec.magnitude)) throw InvalidArgument("anomaly magnitude must be finite");
    switch (spec.kind) {
    case AnomalyKind::Spike:
        if (spec.magnitude == 0.0) throw InvalidArgument("spike magnitude must be non-zero");
        break;
    case AnomalyKind::Level:
        if (spec.magnitude == 0.0) throw InvalidArgument("level magnitude must be non-zero");
        if (level_prefix_direction(spec.subtype) != 0.0 && ts_length - spec.start <= kLevelPrefix)
            throw InvalidArgument("spike-prefixed level shift needs room after its prefix spike");
        break;
    case AnomalyKind::Trend:
        if (spec.magnitude == 0.0) throw InvalidArgument("trend magnitude must be non-zero");
        if (spec.duration < 2) throw InvalidArgument("trend segment needs at least 2 samples");
        if (spec.segment_trend.kind == TrendKind::Steady) throw InvalidArgument("trend segment must not be steady");
        break;
    case AnomalyKind::Frequency:
        if (!(spec.freq_scale > 0.0) || !std::isfinite(spec.freq_scale)) throw InvalidArgument("freq_scale must be positive");
        if (!(spec.magnitude > 0.0)) throw InvalidArgument("frequency amplitude scale must be positive");
        if (spec.harmonics_perturbed < 1 || spec.harmonics_perturbed > 2)
            throw InvalidArgument("harmonics_perturbed must be 1 or 2");
        break;
    }
}

std::vector<double> spike_profile(AnomalySubtype subtype, int duration) {
    if (duration < 1) throw InvalidArgument("spike duration must be positive");
    const auto d = static_cast<std::size_t>(duration);
    std::vector<double> p(d, 1.0);
    switch (subtype) {
    case AnomalySubtype::UpwardSpike:
    case AnomalySubtype::DownwardSpike:
        break;
    case AnomalySubtype::ContinuousUpwardSpike:
    case AnomalySubtype::ContinuousDownwardSpike:
        for (std::size_t i = 1; i < d; i += 2) p[i] = 0.6;
        break;
    case AnomalySubtype::UpwardConvex:
    case AnomalySubtype::DownwardConvex:
        for (std::size_t i = 0; i < d; ++i)
            p[i] = std::sin(std::numbers::pi * static_cast<double>(i + 1) / static_cast<double>(d + 1));
        if (d % 2 == 1) p[d / 2] = 1.0;
        break;
    case AnomalySubtype::RapidRiseSlowDecline:
    case AnomalySubtype::SlowRiseRapidDecline: {
        const std::size_t peak = (d - 1) / 4;
        for (std::size_t i = 0; i < d; ++i) {
            p[i] = i <= peak ? static_cast<double>(i + 1) / static_cast<double>(peak + 1)
                             : 1.0 - static_cast<double>(i - peak) / static_cast<double>(d - peak);
        }
        if (subtype == AnomalySubtype::SlowRiseRapidDecline) std::reverse(p.begin(), p.end());
        break;
    }
    default:
        throw InvalidArgument(fmt::format("{} is not a spike subtype", to_string(subtype)));
    }
    return p;
}

LabeledSeries inject_anomaly(const LabeledSeries& series, const AnomalySpec& spec) {
    if (spec.kind == AnomalyKind::Frequency)
        throw InvalidArgument("frequency anomalies are injected with inject_frequency_anomaly");
    const int L = series.length();
    validate_anomaly(spec, L);
    const Segment seg = labeled_segment(spec, L);
    check_no_conflict(series, seg);

    LabeledSeries out = series;
    auto& v = out.values;
    const double m = std::abs(spec.magnitude);
    switch (spec.kind) {
    case AnomalyKind::Spike: {
        const auto profile = spike_profile(spec.subtype, spec.duration);
        const double dir = spike_direction(spec.subtype);
        for (int i = 0; i < spec.duration; ++i) v[spec.start + i] += dir * m * profile[i];
        break;
    }
    case AnomalyKind::Level: {
        const double step = level_direction(spec.subtype) * m;
        const double prefix = level_prefix_direction(spec.subtype);
        for (int t = spec.start; t < L; ++t) {
            const bool in_prefix = prefix != 0.0 && t < spec.start + kLevelPrefix;
            v[t] += in_prefix ? prefix * 2.0 * m : step;
        }
        break;
    }
    case AnomalyKind::Trend: {
        const auto ramp = gen_trend(spec.segment_trend, spec.duration, m);
        for (int t = spec.start; t < L; ++t) {
            const int i = t - spec.start;
            v[t] += i < spec.duration ? ramp[i] : ramp.back();
        }
        break;
    }
    case AnomalyKind::Frequency:
        break;
    }
    append_label(out, spec, seg);
    return out;
}

LabeledSeries inject_frequency_anomaly(const LabeledSeries& series, const AnomalySpec& spec,
                                       const SeasonalSpec& seasonal) {
    if (spec.kind != AnomalyKind::Frequency) throw InvalidArgument("inject_frequency_anomaly needs a frequency anomaly");
    if (seasonal.period_class != PeriodClass::Observable)
        throw PreconditionError("frequency anomalies require an observable period");
    const int L = series.length();
    validate_anomaly(spec, L);
    const Segment seg = labeled_segment(spec, L);
    check_no_conflict(series, seg);

    // Nominal harmonic amplitude is amplitude_series / n, so the strongest
    // k harmonics are n = 1..k.
    const int k = std::min(spec.harmonics_perturbed, seasonal.num_harmonics);
    HarmonicOverride ov;
    ov.freq_mult.assign(static_cast<std::size_t>(seasonal.num_harmonics), 1.0);
    ov.amp_mult.assign(static_cast<std::size_t>(seasonal.num_harmonics), 1.0);
    for (int i = 0; i < k; ++i) {
        ov.freq_mult[i] = spec.freq_scale;
        ov.amp_mult[i] = spec.magnitude;
    }
    const auto original = gen_seasonal(seasonal, L);
    const auto perturbed = gen_seasonal(seasonal, L, ov);

    LabeledSeries out = series;
    const int d = spec.duration;
    const int w = std::min(kCrossfadeWidth, d / 2);
    for (int i = 0; i < d; ++i) {
        double alpha = 1.0;
        if (w > 0) {
            alpha = std::min(alpha, static_cast<double>(i + 1) / (w + 1));
            alpha = std::min(alpha, static_cast<double>(d - i) / (w + 1));
        }
        const int t = spec.start + i;
        out.values[t] += alpha * (perturbed[t] - original[t]);
    }
    append_label(out, spec, seg);
    return out;
}

LabeledSeries apply_anomaly(const LabeledSeries& series, const AnomalySpec& spec, const SeasonalSpec& seasonal) {
    if (spec.kind == AnomalyKind::Frequency) return inject_frequency_anomaly(series, spec, seasonal);
    return inject_anomaly(series, spec);
}

std::vector<AnomalySpec> sample_anomaly_plan(Rng& rng, const SeriesAttributes& attributes, const GenConfig& cfg) {
    std::vector<AnomalySpec> plan;
    if (cfg.mix.all_zero() || cfg.max_anomalies <= 0) return plan;
    const int L = cfg.ts_length;
    const double scale = attributes.seasonal_peak_to_peak > 0.0 ? attributes.seasonal_peak_to_peak : 1.0;

    AnomalyMix allowed = cfg.mix;
    if (attributes.period_class != PeriodClass::Observable) {
        allowed[AnomalyKind::Trend] = 0.0;
        allowed[AnomalyKind::Frequency] = 0.0;
    }

    const int count = static_cast<int>(rng.uniform_int(0, cfg.max_anomalies));
    std::vector<Segment> occupied;
    for (int slot = 0; slot < count; ++slot) {
        const int ki = rng.weighted_index(allowed.weights);
        if (ki < 0) break;
        const auto kind = static_cast<AnomalyKind>(ki);
        const auto subtypes = subtypes_of(kind);
        AnomalySpec a;
        a.kind = kind;
        a.subtype = subtypes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(subtypes.size()) - 1))];

        switch (kind) {
        case AnomalyKind::Spike:
            a.duration = is_point_spike(a.subtype) ? static_cast<int>(rng.uniform_int(1, 3))
                                                   : static_cast<int>(rng.uniform_int(3, 12));
            a.magnitude = scale * rng.uniform(1.5, 4.0);
            break;
        case AnomalyKind::Level:
            a.magnitude = scale * rng.uniform(0.8, 2.0);
            break;
        case AnomalyKind::Trend:
            a.duration = static_cast<int>(rng.uniform_int(10, L / 2));
            a.magnitude = scale;
            a.segment_trend = sample_nonsteady_trend(rng, Band{0.5, 2.0});
            break;
        case AnomalyKind::Frequency: {
            const double cycles = rng.uniform(1.5, 3.0);
            a.duration = std::clamp(static_cast<int>(std::lround(cycles * attributes.period)), 20, L / 2);
            a.freq_scale = rng.bernoulli(0.5) ? rng.uniform(0.35, 0.7) : rng.uniform(1.6, 3.0);
            a.magnitude = rng.bernoulli(0.5) ? 1.0 : rng.uniform(1.5, 2.5);
            a.harmonics_perturbed = static_cast<int>(rng.uniform_int(1, 2));
            break;
        }
        }

        bool placed = false;
        for (int attempt = 0; attempt < kPlacementRetries && !placed; ++attempt) {
            if (kind == AnomalyKind::Level) {
                a.start = static_cast<int>(rng.uniform_int(L / 10, L - 10));
                a.duration = L - a.start;
            } else {
                const int hi = L - a.duration - kEdgeMargin;
                if (hi < kEdgeMargin) break;
                a.start = static_cast<int>(rng.uniform_int(kEdgeMargin, hi));
            }
            const Segment seg = labeled_segment(a, L);
            placed = std::all_of(occupied.begin(), occupied.end(), [&](Segment o) { return separated(seg, o); });
        }
        if (!placed) continue;
        occupied.push_back(labeled_segment(a, L));
        plan.push_back(a);
        if (is_persistent(kind)) {
            allowed[AnomalyKind::Level] = 0.0;
            allowed[AnomalyKind::Trend] = 0.0;
        }
    }
    std::sort(plan.begin(), plan.end(), [](const AnomalySpec& x, const AnomalySpec& y) { return x.start < y.start; });
    return plan;
}

} // namespace tsvlm
