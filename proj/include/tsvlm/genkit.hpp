// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tsvlm/rng.hpp"
#include "tsvlm/types.hpp"

namespace tsvlm {

struct Band {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Band&, const Band&) = default;
};

// Per-kind anomaly weights, indexed by AnomalyKind.
struct AnomalyMix {
    std::array<double, 4> weights{1.0, 1.0, 1.0, 1.0};

    double& operator[](AnomalyKind k) { return weights[static_cast<std::size_t>(k)]; }
    double operator[](AnomalyKind k) const { return weights[static_cast<std::size_t>(k)]; }
    bool all_zero() const;
    friend bool operator==(const AnomalyMix&, const AnomalyMix&) = default;
};

struct GenConfig {
    int ts_length = 200;
    AnomalyMix mix;
    int max_anomalies = 3;
    // Probability of drawing from the observable period branch.
    double observable_fraction = 0.5;
    Band amplitude{0.5, 2.0};
    Band trend_intensity{0.3, 2.0};
    // Noise sigma as a fraction of seasonal peak-to-peak.
    Band low_noise{0.005, 0.02};
    Band high_noise{0.05, 0.10};
    double high_noise_probability = 0.5;

    // Throws InvalidArgument.
    void validate() const;
    friend bool operator==(const GenConfig&, const GenConfig&) = default;
};

// Displacement |last - first| equals intensity * amplitude.
std::vector<double> gen_trend(const TrendSpec& spec, int ts_length, double amplitude = 1.0);

std::vector<double> gen_seasonal(const SeasonalSpec& spec, int ts_length);

// Per-harmonic overrides used by frequency anomalies: the harmonic with
// index n runs at n * freq_mult[n-1] and amplitude * amp_mult[n-1].
struct HarmonicOverride {
    std::vector<double> freq_mult;
    std::vector<double> amp_mult;
};
std::vector<double> gen_seasonal(const SeasonalSpec& spec, int ts_length, const HarmonicOverride& ov);

std::vector<double> gen_noise(const NoiseSpec& spec, int ts_length, std::uint64_t rng_seed);

TrendSpec sample_trend(Rng& rng, const GenConfig& cfg);
TrendSpec sample_nonsteady_trend(Rng& rng, Band intensity);
SeasonalSpec sample_seasonal(Rng& rng, const GenConfig& cfg);

// Rebuilds the labeled series from its recipe; bit-identical on every call.
LabeledSeries realize(const SeriesSpec& spec);

std::pair<SeriesSpec, LabeledSeries> compose_series(std::uint64_t master_seed, std::uint64_t index,
                                                    const GenConfig& cfg);

double peak_to_peak(std::span<const double> v);

// One value per line, shortest round-trip formatting.
void write_series_csv(std::span<const double> values, const std::string& path);

} // namespace tsvlm
