// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "tsvlm/genkit.hpp"
#include "tsvlm/rng.hpp"
#include "tsvlm/types.hpp"

namespace tsvlm {

// Minimum gap between two planned anomalies, in samples.
inline constexpr int kAnomalySeparation = 5;
// Crossfade width on each side of a frequency anomaly.
inline constexpr int kCrossfadeWidth = 5;

// Level and trend anomalies persist to the end of the series and are
// labeled [start, ts_length - 1].
bool is_persistent(AnomalyKind k);

// Interval that injecting `spec` labels on a series of `ts_length`.
Segment labeled_segment(const AnomalySpec& spec, int ts_length);

// Structural checks shared by the sampler and the injectors.
void validate_anomaly(const AnomalySpec& spec, int ts_length);

// 0 to cfg.max_anomalies non-overlapping anomalies at least
// kAnomalySeparation apart. Trend and frequency kinds require an observable
// period. `attributes.seasonal_peak_to_peak` sets magnitude scale.
std::vector<AnomalySpec> sample_anomaly_plan(Rng& rng, const SeriesAttributes& attributes, const GenConfig& cfg);

// Spike, level and trend kinds. Throws InvalidArgument when out of bounds,
// ConflictError when the new label overlaps an existing one.
LabeledSeries inject_anomaly(const LabeledSeries& series, const AnomalySpec& spec);

// Frequency kind: regenerates the seasonal component inside the interval from
// a copy of `seasonal` whose strongest harmonics are rescaled.
LabeledSeries inject_frequency_anomaly(const LabeledSeries& series, const AnomalySpec& spec,
                                       const SeasonalSpec& seasonal);

// Dispatches on spec.kind.
LabeledSeries apply_anomaly(const LabeledSeries& series, const AnomalySpec& spec, const SeasonalSpec& seasonal);

// Unit-peak shape of a spike subtype over `duration` samples.
std::vector<double> spike_profile(AnomalySubtype subtype, int duration);

} // namespace tsvlm
