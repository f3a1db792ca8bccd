// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "json.hpp"
#include "tsvlm/evalkit.hpp"
#include "tsvlm/genkit.hpp"
#include "tsvlm/render.hpp"
#include "tsvlm/reward.hpp"
#include "tsvlm/types.hpp"

// JSON mappings. Enums are written by name. Configuration readers start from
// the receiver's current values, so a partial document only overrides the
// keys it names; unknown keys raise InvalidArgument.
namespace tsvlm {

using Json = nlohmann::ordered_json;

void to_json(Json& j, const Segment& v);
void to_json(Json& j, const TrendKnot& v);
void to_json(Json& j, const TrendSpec& v);
void to_json(Json& j, const Harmonic& v);
void to_json(Json& j, const SeasonalSpec& v);
void to_json(Json& j, const NoiseSpec& v);
void to_json(Json& j, const AnomalySpec& v);
void to_json(Json& j, const AnomalyInterval& v);
void to_json(Json& j, const SeriesSpec& v);
void to_json(Json& j, const SeriesAttributes& v);
void to_json(Json& j, const Band& v);
void to_json(Json& j, const GenConfig& v);
void to_json(Json& j, const RenderSpec& v);
void to_json(Json& j, const RewardConfig& v);
void to_json(Json& j, const WindowPlan& v);
void to_json(Json& j, const KindStats& v);
void to_json(Json& j, const EvalReport& v);

void from_json(const Json& j, TrendKnot& v);
void from_json(const Json& j, TrendSpec& v);
void from_json(const Json& j, Harmonic& v);
void from_json(const Json& j, SeasonalSpec& v);
void from_json(const Json& j, NoiseSpec& v);
void from_json(const Json& j, AnomalySpec& v);
void from_json(const Json& j, AnomalyInterval& v);
void from_json(const Json& j, SeriesSpec& v);
void from_json(const Json& j, SeriesAttributes& v);
void from_json(const Json& j, EvalReport& v);

void merge_json(const Json& j, Band& v);
void merge_json(const Json& j, GenConfig& v);
void merge_json(const Json& j, RenderSpec& v);
void merge_json(const Json& j, RewardConfig& v);
void merge_json(const Json& j, WindowPlan& v);

// Whole-file helpers; IoError carries the path.
Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& j, const std::filesystem::path& path);

} // namespace tsvlm
