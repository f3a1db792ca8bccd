// SPDX-License-Identifier: Apache-2.0
#include "tsvlm/qagen.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "tsvlm/error.hpp"
#include "tsvlm/evalkit.hpp"
#include "tsvlm/parsefmt.hpp"
#include "tsvlm/serialize.hpp"

namespace tsvlm {

const std::string_view kDescribePrompt = "<image>Given the time series visualization, analyze the time series.";
const std::string_view kDetectPrompt =
    "<image>Given the time series visualization, is there any anomaly in the time series? Output the anomalous "
    "intervals.\nOutput Format: boxed{[[start1, end1], [start2, end2], ...]}";

namespace {

std::string spaced(std::string_view name) {
    std::string s(name);
    std::replace(s.begin(), s.end(), '-', ' ');
    return s;
}

int scale_index(int v, double factor, int max_index) {
    return static_cast<int>(std::clamp(std::round(v * factor), 0.0, static_cast<double>(max_index)));
}

std::string periodicity_sentence(const SeriesAttributes& a, int extent) {
    if (a.period_class == PeriodClass::Observable)
        return fmt::format("The time series shows periodicity: the amplitude of the periodic fluctuation between point 0 "
                           "and point {} is {:.1f}, the period of the fluctuation is {:g}.",
                           extent, a.seasonal_peak_to_peak, a.period);
    return fmt::format("The time series shows no significant periodicity observable within the window: the amplitude "
                       "of the slow fluctuation between point 0 and point {} is {:.1f}.",
                       extent, a.seasonal_peak_to_peak);
}

std::string trend_sentence(TrendKind k) {
    const char* word = k == TrendKind::Increase ? "increasing" : k == TrendKind::Decrease ? "decreasing" : "steady";
    return fmt::format("From the perspective of the slope, the overall trend is {}.", word);
}

std::string anomaly_sentence(std::span<const AnomalyInterval> intervals, double factor, int max_index) {
    if (intervals.empty()) return "There are no anomalies in the time series.";
    std::string s = intervals.size() == 1 ? "There is 1 anomaly in the time series: "
                                          : fmt::format("There are {} anomalies in the time series: ", intervals.size());
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        if (i) s += "; ";
        s += fmt::format("a {} ({} anomaly) between point {} and point {}", spaced(to_string(iv.subtype)),
                         to_string(iv.kind), scale_index(iv.start, factor, max_index),
                         scale_index(iv.end, factor, max_index));
    }
    return s + ".";
}

std::string noise_sentence(const NoiseSpec& n) {
    if (n.level == NoiseLevel::Low)
        return fmt::format("The overall noise standard deviation is around {:.2g}, very small compared with the overall "
                           "change of the curve. The curve is overall smooth with almost no noise.",
                           n.sigma);
    return fmt::format("The overall noise standard deviation is around {:.2g}, noticeable compared with the overall "
                       "change of the curve. The curve shows strong noise.",
                       n.sigma);
}

std::string manifest_line(const QARecord& r) {
    Json j;
    j["id"] = r.id;
    j["stage"] = to_string(r.stage);
    j["image"] = r.image_path;
    j["question"] = r.question;
    j["answer"] = r.answer;
    j["intervals"] = r.ground_truth;
    j["attributes"] = r.attributes;
    j["seed"] = r.seed;
    return j.dump();
}

} // namespace

std::string_view to_string(QAStage s) { return s == QAStage::Describe ? "describe" : "detect"; }

QAStage qa_stage_from_string(std::string_view s) {
    if (s == "describe") return QAStage::Describe;
    if (s == "detect") return QAStage::Detect;
    throw InvalidArgument(fmt::format("unknown QA stage '{}'", s));
}

std::string describe_attributes(const SeriesSpec& spec, const LabeledSeries& labeled, double factor) {
    if (!(factor > 0.0)) throw InvalidArgument("description scale factor must be positive");
    const int extent = static_cast<int>(std::lround(labeled.length() * factor));
    const int max_index = std::max(extent - 1, 0);
    std::string out = periodicity_sentence(labeled.attributes, extent);
    out += ' ';
    out += trend_sentence(labeled.attributes.trend);
    out += ' ';
    out += anomaly_sentence(labeled.intervals, factor, max_index);
    out += ' ';
    out += noise_sentence(spec.noise);
    return out;
}

std::vector<AnomalyInterval> canonical_intervals(const LabeledSeries& labeled, const ImageArtifact& image) {
    std::vector<AnomalyInterval> out;
    out.reserve(labeled.intervals.size());
    for (const auto& iv : labeled.intervals) {
        const Segment seg = iv.segment();
        const auto m = map_intervals(std::span<const Segment>(&seg, 1), image.rescale_factor, MapDirection::ToCanonical,
                                     image.canonical_length - 1)[0];
        out.push_back({m.start, m.end, iv.kind, iv.subtype});
    }
    return out;
}

std::string detect_answer(std::span<const AnomalyInterval> intervals) {
    std::vector<Segment> segs;
    segs.reserve(intervals.size());
    for (const auto& iv : intervals) segs.push_back(iv.segment());
    return "Final Answer: " + to_boxed(segs);
}

QARecord make_qa(const SeriesSpec& spec, const LabeledSeries& labeled, const ImageArtifact& image, QAStage stage,
                 std::string id, std::string image_path) {
    if (image.source_length != labeled.length())
        throw InvalidArgument(fmt::format("image rendered from {} points but the series has {}", image.source_length,
                                          labeled.length()));
    if (spec.ts_length != labeled.length())
        throw InvalidArgument("series spec and labeled series disagree on length");
    QARecord r;
    r.id = std::move(id);
    r.stage = stage;
    r.image_path = std::move(image_path);
    r.ground_truth = canonical_intervals(labeled, image);
    r.attributes = labeled.attributes;
    r.seed = spec.seed;
    r.png = image.png;
    if (stage == QAStage::Describe) {
        r.question = kDescribePrompt;
        r.answer = describe_attributes(spec, labeled, image.rescale_factor);
    } else {
        r.question = kDetectPrompt;
        r.answer = detect_answer(r.ground_truth);
    }
    return r;
}

ManifestWriter::ManifestWriter(const std::filesystem::path& out_dir, std::string manifest_name)
    : dir_(out_dir), path_(out_dir / manifest_name) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory", dir_.string());
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot create manifest", path_.string());
}

void ManifestWriter::add(const QARecord& r) {
    if (!r.png.empty() && !r.image_path.empty()) {
        const auto img = dir_ / r.image_path;
        std::error_code ec;
        std::filesystem::create_directories(img.parent_path(), ec);
        std::ofstream f(img, std::ios::binary | std::ios::trunc);
        f.write(reinterpret_cast<const char*>(r.png.data()), static_cast<std::streamsize>(r.png.size()));
        if (!f) throw IoError("cannot write image", img.string());
    }
    out_ << manifest_line(r) << '\n';
    if (!out_) throw IoError("manifest write failed", path_.string());
    ++summary_.records;
    ++summary_.per_stage[std::string(to_string(r.stage))];
    for (const auto& iv : r.ground_truth) ++summary_.per_kind[std::string(to_string(iv.kind))];
}

void ManifestWriter::close() {
    out_.close();
    if (out_.fail()) throw IoError("manifest close failed", path_.string());
}

ManifestSummary write_manifest(std::span<const QARecord> records, const std::filesystem::path& out_dir) {
    ManifestWriter w(out_dir);
    for (const auto& r : records) w.add(r);
    w.close();
    return w.summary();
}

std::string format_summary_table(const ManifestSummary& s) {
    std::string out = fmt::format("{:<12} {:>8}\n", "stage", "records");
    for (const auto& [k, n] : s.per_stage) out += fmt::format("{:<12} {:>8}\n", k, n);
    out += fmt::format("{:<12} {:>8}\n", "total", s.records);
    out += fmt::format("\n{:<12} {:>8}\n", "kind", "intervals");
    for (const auto& [k, n] : s.per_kind) out += fmt::format("{:<12} {:>8}\n", k, n);
    return out;
}

} // namespace tsvlm
