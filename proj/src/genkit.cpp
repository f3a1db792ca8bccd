// SPDX-License-Identifier: Apache-2.0
#include "tsvlm/genkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "tsvlm/anomaly.hpp"
#include "tsvlm/error.hpp"

namespace tsvlm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Curvatures of the exponential and logarithmic trend shapes.
constexpr double kExpCurvature = 3.0;
constexpr double kLogCurvature = 9.0;
constexpr std::uint64_t kNoiseStream = 1;

void validate_trend(const TrendSpec& spec) {
    if (spec.kind == TrendKind::Steady) {
        if (spec.intensity != 0.0) throw InvalidArgument("steady trend must have zero intensity");
        return;
    }
    if (!(spec.intensity > 0.0) || !std::isfinite(spec.intensity))
        throw InvalidArgument("non-steady trend needs a positive intensity");
    if (spec.shape == TrendShape::PiecewiseLinear) {
        if (spec.knots.empty()) throw InvalidArgument("piecewise-linear trend needs knots");
        double px = 0.0, py = 0.0;
        for (const auto& k : spec.knots) {
            if (!(k.x > px) || !(k.x < 1.0)) throw InvalidArgument("trend knots must be strictly increasing inside (0, 1)");
            if (k.y < py || k.y > 1.0) throw InvalidArgument("trend knot levels must be non-decreasing in [0, 1]");
            px = k.x;
            py = k.y;
        }
    }
}

// Monotone map [0, 1] -> [0, 1] with g(0) = 0 and g(1) = 1.
double trend_shape(const TrendSpec& spec, double u) {
    switch (spec.shape) {
    case TrendShape::Linear:
        return u;
    case TrendShape::Exponential:
        return std::expm1(kExpCurvature * u) / std::expm1(kExpCurvature);
    case TrendShape::Logarithmic:
        return std::log1p(kLogCurvature * u) / std::log1p(kLogCurvature);
    case TrendShape::PiecewiseLinear: {
        double x0 = 0.0, y0 = 0.0;
        for (const auto& k : spec.knots) {
            if (u <= k.x) return y0 + (k.y - y0) * (u - x0) / (k.x - x0);
            x0 = k.x;
            y0 = k.y;
        }
        return y0 + (1.0 - y0) * (u - x0) / (1.0 - x0);
    }
    }
    return u;
}

void validate_seasonal(const SeasonalSpec& spec) {
    if (!(spec.period > 0.0) || !std::isfinite(spec.period)) throw InvalidArgument("seasonal period must be positive");
    if (spec.num_harmonics < 1 || spec.num_harmonics > 10) throw InvalidArgument("num_harmonics must be in [1, 10]");
    if (static_cast<int>(spec.harmonics.size()) != spec.num_harmonics)
        throw InvalidArgument("harmonics list length must equal num_harmonics");
    for (std::size_t i = 0; i < spec.harmonics.size(); ++i)
        if (spec.harmonics[i].n != static_cast<int>(i) + 1) throw InvalidArgument("harmonic indices must be 1..num_harmonics");
    if (!(spec.amplitude_series >= 0.0)) throw InvalidArgument("amplitude_series must be non-negative");
}

void validate_band(Band b, const char* name) {
    if (!(b.lo <= b.hi) || b.lo < 0.0) throw InvalidArgument(fmt::format("{} band must satisfy 0 <= lo <= hi", name));
}

} // namespace

bool AnomalyMix::all_zero() const {
    return std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; });
}

void GenConfig::validate() const {
    if (ts_length < 20) throw InvalidArgument("ts_length must be at least 20");
    for (double w : mix.weights)
        if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("anomaly mix weights must be non-negative");
    if (max_anomalies < 0 || max_anomalies > 3) throw InvalidArgument("max_anomalies must be in [0, 3]");
    if (!(observable_fraction >= 0.0 && observable_fraction <= 1.0))
        throw InvalidArgument("observable_fraction must be in [0, 1]");
    if (!(high_noise_probability >= 0.0 && high_noise_probability <= 1.0))
        throw InvalidArgument("high_noise_probability must be in [0, 1]");
    validate_band(amplitude, "amplitude");
    validate_band(trend_intensity, "trend_intensity");
    validate_band(low_noise, "low_noise");
    validate_band(high_noise, "high_noise");
    if (amplitude.lo <= 0.0) throw InvalidArgument("amplitude band must be positive");
    if (trend_intensity.lo <= 0.0) throw InvalidArgument("trend_intensity band must be positive");
}

std::vector<double> gen_trend(const TrendSpec& spec, int ts_length, double amplitude) {
    if (ts_length < 2) throw InvalidArgument("gen_trend: ts_length must be at least 2");
    validate_trend(spec);
    std::vector<double> out(static_cast<std::size_t>(ts_length), 0.0);
    if (spec.kind == TrendKind::Steady) return out;
    const double total = spec.intensity * amplitude * (spec.kind == TrendKind::Increase ? 1.0 : -1.0);
    const double denom = static_cast<double>(ts_length - 1);
    for (int t = 0; t < ts_length; ++t) out[t] = total * trend_shape(spec, t / denom);
    return out;
}

std::vector<double> gen_seasonal(const SeasonalSpec& spec, int ts_length) {
    return gen_seasonal(spec, ts_length, HarmonicOverride{});
}

std::vector<double> gen_seasonal(const SeasonalSpec& spec, int ts_length, const HarmonicOverride& ov) {
    if (ts_length < 1) throw InvalidArgument("gen_seasonal: ts_length must be positive");
    validate_seasonal(spec);
    std::vector<double> data(static_cast<std::size_t>(ts_length), 0.0);
    const double base = spec.base_frequency();
    const double len = static_cast<double>(ts_length);
    for (const auto& h : spec.harmonics) {
        const auto idx = static_cast<std::size_t>(h.n - 1);
        const double fm = idx < ov.freq_mult.size() ? ov.freq_mult[idx] : 1.0;
        const double am = idx < ov.amp_mult.size() ? ov.amp_mult[idx] : 1.0;
        const double nominal = spec.amplitude_series / h.n * am;
        const double freq = base * (h.n * fm);
        for (int t = 0; t < ts_length; ++t) {
            const double amp =
                nominal * (1.0 + h.perturb_depth * std::sin(h.perturb_freq * std::numbers::pi * t / len + h.perturb_phase));
            data[t] += amp * std::sin(kTwoPi * freq * t + h.phase);
        }
    }
    return data;
}

std::vector<double> gen_noise(const NoiseSpec& spec, int ts_length, std::uint64_t rng_seed) {
    if (ts_length < 1) throw InvalidArgument("gen_noise: ts_length must be positive");
    if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) throw InvalidArgument("gen_noise: sigma must be non-negative");
    std::vector<double> out(static_cast<std::size_t>(ts_length), 0.0);
    if (spec.sigma == 0.0) return out;
    Rng rng(rng_seed);
    for (auto& v : out) v = rng.normal(0.0, spec.sigma);
    return out;
}

TrendSpec sample_nonsteady_trend(Rng& rng, Band intensity) {
    TrendSpec t;
    t.kind = rng.bernoulli(0.5) ? TrendKind::Increase : TrendKind::Decrease;
    t.shape = static_cast<TrendShape>(rng.uniform_int(0, 3));
    t.intensity = rng.uniform(intensity.lo, intensity.hi);
    if (t.intensity <= 0.0) t.intensity = intensity.hi > 0.0 ? intensity.hi : 1.0;
    if (t.shape == TrendShape::PiecewiseLinear) {
        const int n = static_cast<int>(rng.uniform_int(2, 4));
        std::vector<double> xs, ys;
        while (static_cast<int>(xs.size()) < n) {
            const double x = rng.uniform(0.05, 0.95);
            if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
        }
        for (int i = 0; i < n; ++i) ys.push_back(rng.uniform01());
        std::sort(xs.begin(), xs.end());
        std::sort(ys.begin(), ys.end());
        for (int i = 0; i < n; ++i) t.knots.push_back({xs[i], ys[i]});
    }
    return t;
}

TrendSpec sample_trend(Rng& rng, const GenConfig& cfg) {
    const auto kind = static_cast<TrendKind>(rng.uniform_int(0, 2));
    if (kind == TrendKind::Steady) return TrendSpec{};
    TrendSpec t = sample_nonsteady_trend(rng, cfg.trend_intensity);
    t.kind = kind;
    return t;
}

SeasonalSpec sample_seasonal(Rng& rng, const GenConfig& cfg) {
    const int L = cfg.ts_length;
    SeasonalSpec s;
    if (rng.bernoulli(cfg.observable_fraction)) {
        s.period = static_cast<double>(rng.uniform_int(10, L / 2));
    } else {
        s.period = static_cast<double>(rng.uniform_int(L / 2 + 1, 3 * L));
    }
    s.period_class = s.period <= L / 2.0 ? PeriodClass::Observable : PeriodClass::SubWindow;
    s.amplitude_series = rng.uniform(cfg.amplitude.lo, cfg.amplitude.hi);
    s.num_harmonics = static_cast<int>(rng.uniform_int(1, 10));
    for (int n = 1; n <= s.num_harmonics; ++n) {
        Harmonic h;
        h.n = n;
        h.phase = rng.uniform(0.0, kTwoPi);
        h.perturb_depth = rng.uniform(0.0, 0.05);
        h.perturb_freq = rng.uniform(1.0, 3.0);
        h.perturb_phase = rng.uniform(0.0, kTwoPi);
        s.harmonics.push_back(h);
    }
    return s;
}

double peak_to_peak(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

LabeledSeries realize(const SeriesSpec& spec) {
    const int L = spec.ts_length;
    const auto trend = gen_trend(spec.trend, L, spec.seasonal.amplitude_series);
    const auto seasonal = gen_seasonal(spec.seasonal, L);
    const auto noise = gen_noise(spec.noise, L, derive_seed(spec.seed, kNoiseStream));

    LabeledSeries out;
    out.values.resize(static_cast<std::size_t>(L));
    for (int t = 0; t < L; ++t) out.values[t] = trend[t] + seasonal[t] + noise[t];
    out.attributes.trend = spec.trend.kind;
    out.attributes.period = spec.seasonal.period;
    out.attributes.period_class = spec.seasonal.period_class;
    out.attributes.noise = spec.noise.level;
    out.attributes.seasonal_peak_to_peak = peak_to_peak(seasonal);

    for (const auto& a : spec.anomaly_plan) out = apply_anomaly(out, a, spec.seasonal);
    return out;
}

std::pair<SeriesSpec, LabeledSeries> compose_series(std::uint64_t master_seed, std::uint64_t index,
                                                    const GenConfig& cfg) {
    cfg.validate();
    SeriesSpec spec;
    spec.seed = item_seed(master_seed, index);
    spec.ts_length = cfg.ts_length;
    Rng rng(spec.seed);

    spec.trend = sample_trend(rng, cfg);
    spec.seasonal = sample_seasonal(rng, cfg);
    const double p2p = peak_to_peak(gen_seasonal(spec.seasonal, cfg.ts_length));
    const bool high = rng.bernoulli(cfg.high_noise_probability);
    const Band band = high ? cfg.high_noise : cfg.low_noise;
    spec.noise.level = high ? NoiseLevel::High : NoiseLevel::Low;
    spec.noise.sigma = rng.uniform(band.lo, band.hi) * p2p;

    SeriesAttributes attrs;
    attrs.trend = spec.trend.kind;
    attrs.period = spec.seasonal.period;
    attrs.period_class = spec.seasonal.period_class;
    attrs.noise = spec.noise.level;
    attrs.seasonal_peak_to_peak = p2p;
    spec.anomaly_plan = sample_anomaly_plan(rng, attrs, cfg);

    LabeledSeries labeled = realize(spec);
    return {std::move(spec), std::move(labeled)};
}

void write_series_csv(std::span<const double> values, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing", path);
    for (double v : values) out << fmt::format("{}\n", v);
    if (!out) throw IoError("write failed", path);
}

} // namespace tsvlm
