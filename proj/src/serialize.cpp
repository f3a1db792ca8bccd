// SPDX-License-Identifier: Apache-2.0
#include "tsvlm/serialize.hpp"

#include <fstream>
#include <functional>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "tsvlm/error.hpp"

namespace tsvlm {

namespace {

using Setter = std::pair<std::string_view, std::function<void(const Json&)>>;

void apply_fields(const Json& j, std::string_view what, std::initializer_list<Setter> fields) {
    if (!j.is_object()) throw InvalidArgument(fmt::format("{} must be a JSON object", what));
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const auto& [name, set] : fields) {
            if (name != key) continue;
            known = true;
            try {
                set(value);
            } catch (const nlohmann::json::exception& e) {
                throw InvalidArgument(fmt::format("{}.{}: {}", what, key, e.what()));
            }
        }
        if (!known) throw InvalidArgument(fmt::format("unknown key '{}' in {}", key, what));
    }
}

template <typename T>
std::function<void(const Json&)> assign(T& dst) {
    return [&dst](const Json& v) { dst = v.get<T>(); };
}

std::string name_of(const Json& v) { return v.get<std::string>(); }

} // namespace

void to_json(Json& j, const Segment& v) { j = Json::array({v.start, v.end}); }

void to_json(Json& j, const TrendKnot& v) { j = {{"x", v.x}, {"y", v.y}}; }

void to_json(Json& j, const TrendSpec& v) {
    j = {{"kind", to_string(v.kind)}, {"shape", to_string(v.shape)}, {"intensity", v.intensity}};
    j["knots"] = v.knots;
}

void to_json(Json& j, const Harmonic& v) {
    j = {{"n", v.n},
         {"phase", v.phase},
         {"perturb_depth", v.perturb_depth},
         {"perturb_freq", v.perturb_freq},
         {"perturb_phase", v.perturb_phase}};
}

void to_json(Json& j, const SeasonalSpec& v) {
    j = {{"period", v.period},
         {"period_class", to_string(v.period_class)},
         {"amplitude_series", v.amplitude_series},
         {"num_harmonics", v.num_harmonics}};
    j["harmonics"] = v.harmonics;
}

void to_json(Json& j, const NoiseSpec& v) { j = {{"level", to_string(v.level)}, {"sigma", v.sigma}}; }

void to_json(Json& j, const AnomalySpec& v) {
    j = {{"kind", to_string(v.kind)},
         {"subtype", to_string(v.subtype)},
         {"start", v.start},
         {"duration", v.duration},
         {"magnitude", v.magnitude}};
    if (v.kind == AnomalyKind::Frequency) {
        j["freq_scale"] = v.freq_scale;
        j["harmonics_perturbed"] = v.harmonics_perturbed;
    }
    if (v.kind == AnomalyKind::Trend) j["segment_trend"] = v.segment_trend;
}

void to_json(Json& j, const AnomalyInterval& v) {
    j = {{"start", v.start}, {"end", v.end}, {"kind", to_string(v.kind)}, {"subtype", to_string(v.subtype)}};
}

void to_json(Json& j, const SeriesSpec& v) {
    j = {{"seed", v.seed}, {"ts_length", v.ts_length}};
    j["trend"] = v.trend;
    j["seasonal"] = v.seasonal;
    j["noise"] = v.noise;
    j["anomaly_plan"] = v.anomaly_plan;
}

void to_json(Json& j, const SeriesAttributes& v) {
    j = {{"trend", to_string(v.trend)},
         {"period", v.period},
         {"period_class", to_string(v.period_class)},
         {"noise", to_string(v.noise)},
         {"seasonal_peak_to_peak", v.seasonal_peak_to_peak}};
}

void to_json(Json& j, const Band& v) { j = Json::array({v.lo, v.hi}); }

void to_json(Json& j, const GenConfig& v) {
    j = {{"ts_length", v.ts_length}, {"max_anomalies", v.max_anomalies}};
    Json mix = Json::object();
    for (auto k : {AnomalyKind::Spike, AnomalyKind::Level, AnomalyKind::Trend, AnomalyKind::Frequency})
        mix[std::string(to_string(k))] = v.mix[k];
    j["mix"] = mix;
    j["observable_fraction"] = v.observable_fraction;
    j["amplitude"] = v.amplitude;
    j["trend_intensity"] = v.trend_intensity;
    j["low_noise"] = v.low_noise;
    j["high_noise"] = v.high_noise;
    j["high_noise_probability"] = v.high_noise_probability;
}

void to_json(Json& j, const RenderSpec& v) {
    j = {{"canonical_length", v.canonical_length},
         {"image_width", v.image_width},
         {"image_height", v.image_height},
         {"style", to_string(v.style)},
         {"stft_window", v.stft_window},
         {"stft_hop", v.stft_hop}};
}

void to_json(Json& j, const RewardConfig& v) {
    j = {{"w_f1", v.w_f1},
         {"w_format", v.w_format},
         {"empty_correct", v.empty_correct},
         {"empty_wrong", v.empty_wrong},
         {"negative_reward_enabled", v.negative_reward_enabled}};
}

void to_json(Json& j, const WindowPlan& v) {
    j = {{"window", v.window}, {"step", v.step}, {"resize_factor", v.resize_factor}};
    if (v.canonical_override) j["canonical_length"] = *v.canonical_override;
}

void to_json(Json& j, const KindStats& v) {
    j = {{"segments", v.segments}, {"detected", v.detected}, {"recall", v.recall()}};
}

void to_json(Json& j, const EvalReport& v) {
    j = {{"precision", v.precision},
         {"recall", v.recall},
         {"f1", v.f1},
         {"threshold", v.threshold},
         {"n_windows", v.n_windows},
         {"n_series", v.n_series},
         {"n_points", v.n_points},
         {"n_failed", v.n_failed},
         {"n_unparsed", v.n_unparsed}};
    Json kinds = Json::object();
    for (const auto& [k, s] : v.per_kind) kinds[k] = s;
    j["per_kind"] = kinds;
}

void from_json(const Json& j, TrendKnot& v) {
    v.x = j.at("x").get<double>();
    v.y = j.at("y").get<double>();
}

void from_json(const Json& j, TrendSpec& v) {
    v.kind = trend_kind_from_string(j.at("kind").get<std::string>());
    v.shape = trend_shape_from_string(j.at("shape").get<std::string>());
    v.intensity = j.at("intensity").get<double>();
    v.knots = j.value("knots", Json::array()).get<std::vector<TrendKnot>>();
}

void from_json(const Json& j, Harmonic& v) {
    v.n = j.at("n").get<int>();
    v.phase = j.at("phase").get<double>();
    v.perturb_depth = j.at("perturb_depth").get<double>();
    v.perturb_freq = j.at("perturb_freq").get<double>();
    v.perturb_phase = j.at("perturb_phase").get<double>();
}

void from_json(const Json& j, SeasonalSpec& v) {
    v.period = j.at("period").get<double>();
    v.period_class = period_class_from_string(j.at("period_class").get<std::string>());
    v.amplitude_series = j.at("amplitude_series").get<double>();
    v.num_harmonics = j.at("num_harmonics").get<int>();
    v.harmonics = j.at("harmonics").get<std::vector<Harmonic>>();
}

void from_json(const Json& j, NoiseSpec& v) {
    v.level = noise_level_from_string(j.at("level").get<std::string>());
    v.sigma = j.at("sigma").get<double>();
}

void from_json(const Json& j, AnomalySpec& v) {
    v = AnomalySpec{};
    v.kind = anomaly_kind_from_string(j.at("kind").get<std::string>());
    v.subtype = anomaly_subtype_from_string(j.at("subtype").get<std::string>());
    v.start = j.at("start").get<int>();
    v.duration = j.at("duration").get<int>();
    v.magnitude = j.at("magnitude").get<double>();
    if (j.contains("freq_scale")) v.freq_scale = j["freq_scale"].get<double>();
    if (j.contains("harmonics_perturbed")) v.harmonics_perturbed = j["harmonics_perturbed"].get<int>();
    if (j.contains("segment_trend")) v.segment_trend = j["segment_trend"].get<TrendSpec>();
}

void from_json(const Json& j, AnomalyInterval& v) {
    v.start = j.at("start").get<int>();
    v.end = j.at("end").get<int>();
    v.kind = anomaly_kind_from_string(j.at("kind").get<std::string>());
    v.subtype = anomaly_subtype_from_string(j.at("subtype").get<std::string>());
}

void from_json(const Json& j, SeriesSpec& v) {
    v.seed = j.at("seed").get<std::uint64_t>();
    v.ts_length = j.at("ts_length").get<int>();
    v.trend = j.at("trend").get<TrendSpec>();
    v.seasonal = j.at("seasonal").get<SeasonalSpec>();
    v.noise = j.at("noise").get<NoiseSpec>();
    v.anomaly_plan = j.at("anomaly_plan").get<std::vector<AnomalySpec>>();
}

void from_json(const Json& j, SeriesAttributes& v) {
    v.trend = trend_kind_from_string(j.at("trend").get<std::string>());
    v.period = j.at("period").get<double>();
    v.period_class = period_class_from_string(j.at("period_class").get<std::string>());
    v.noise = noise_level_from_string(j.at("noise").get<std::string>());
    v.seasonal_peak_to_peak = j.at("seasonal_peak_to_peak").get<double>();
}

void from_json(const Json& j, EvalReport& v) {
    v.precision = j.at("precision").get<double>();
    v.recall = j.at("recall").get<double>();
    v.f1 = j.at("f1").get<double>();
    v.threshold = j.at("threshold").get<int>();
    v.n_windows = j.at("n_windows").get<int>();
    v.n_series = j.value("n_series", 0);
    v.n_points = j.value("n_points", 0L);
    v.n_failed = j.value("n_failed", 0);
    v.n_unparsed = j.value("n_unparsed", 0);
    v.per_kind.clear();
    if (j.contains("per_kind"))
        for (const auto& [k, s] : j["per_kind"].items())
            v.per_kind[k] = {s.at("segments").get<int>(), s.at("detected").get<int>()};
}

void merge_json(const Json& j, Band& v) {
    if (!j.is_array() || j.size() != 2) throw InvalidArgument("band must be a [lo, hi] pair");
    v.lo = j[0].get<double>();
    v.hi = j[1].get<double>();
}

void merge_json(const Json& j, GenConfig& v) {
    const auto band = [](Band& b) { return [&b](const Json& x) { merge_json(x, b); }; };
    apply_fields(j, "gen config",
                 {{"ts_length", assign(v.ts_length)},
                  {"max_anomalies", assign(v.max_anomalies)},
                  {"mix",
                   [&v](const Json& m) {
                       if (!m.is_object()) throw InvalidArgument("mix must map anomaly kinds to weights");
                       for (const auto& [k, w] : m.items()) v.mix[anomaly_kind_from_string(k)] = w.get<double>();
                   }},
                  {"observable_fraction", assign(v.observable_fraction)},
                  {"amplitude", band(v.amplitude)},
                  {"trend_intensity", band(v.trend_intensity)},
                  {"low_noise", band(v.low_noise)},
                  {"high_noise", band(v.high_noise)},
                  {"high_noise_probability", assign(v.high_noise_probability)}});
}

void merge_json(const Json& j, RenderSpec& v) {
    apply_fields(j, "render config",
                 {{"canonical_length", assign(v.canonical_length)},
                  {"image_width", assign(v.image_width)},
                  {"image_height", assign(v.image_height)},
                  {"style", [&v](const Json& x) { v.style = render_style_from_string(name_of(x)); }},
                  {"stft_window", assign(v.stft_window)},
                  {"stft_hop", assign(v.stft_hop)}});
}

void merge_json(const Json& j, RewardConfig& v) {
    apply_fields(j, "reward config",
                 {{"w_f1", assign(v.w_f1)},
                  {"w_format", assign(v.w_format)},
                  {"empty_correct", assign(v.empty_correct)},
                  {"empty_wrong", assign(v.empty_wrong)},
                  {"negative_reward_enabled", assign(v.negative_reward_enabled)}});
}

void merge_json(const Json& j, WindowPlan& v) {
    apply_fields(j, "window plan",
                 {{"window", assign(v.window)},
                  {"step", assign(v.step)},
                  {"resize_factor", assign(v.resize_factor)},
                  {"canonical_length", [&v](const Json& x) {
                       if (x.is_null()) v.canonical_override.reset();
                       else v.canonical_override = x.get<int>();
                   }}});
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open JSON file", path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidArgument(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write JSON file", path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed", path.string());
}

} // namespace tsvlm
