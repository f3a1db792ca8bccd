// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsvlm/render.hpp"
#include "tsvlm/types.hpp"

namespace tsvlm {

enum class QAStage { Describe, Detect };
std::string_view to_string(QAStage s);
QAStage qa_stage_from_string(std::string_view s);

extern const std::string_view kDescribePrompt;
extern const std::string_view kDetectPrompt;

struct QARecord {
    std::string id;
    QAStage stage = QAStage::Detect;
    std::string image_path;  // relative to the manifest directory
    std::string question;
    std::string answer;
    std::vector<AnomalyInterval> ground_truth;  // canonical coordinates
    SeriesAttributes attributes;
    std::uint64_t seed = 0;
    std::vector<std::uint8_t> png;
};

// Four-part description: periodicity, trend, anomalies, noise. Interval
// endpoints and the window extent are scaled by `factor` (canonical /
// source length).
std::string describe_attributes(const SeriesSpec& spec, const LabeledSeries& labeled, double factor = 1.0);

// Ground-truth intervals in canonical coordinates, clamped to the last
// canonical index.
std::vector<AnomalyInterval> canonical_intervals(const LabeledSeries& labeled, const ImageArtifact& image);

// "Final Answer: boxed{[[s, e], ...]}"
std::string detect_answer(std::span<const AnomalyInterval> intervals);

// Throws InvalidArgument when the image was not rendered from a series of
// this length.
QARecord make_qa(const SeriesSpec& spec, const LabeledSeries& labeled, const ImageArtifact& image, QAStage stage,
                 std::string id, std::string image_path);

struct ManifestSummary {
    std::size_t records = 0;
    std::map<std::string, std::size_t> per_stage;
    std::map<std::string, std::size_t> per_kind;  // anomaly intervals by kind
};

// Appends records to `<dir>/manifest.jsonl` and their PNGs to
// `<dir>/<image_path>`, strictly in the order added.
class ManifestWriter {
public:
    explicit ManifestWriter(const std::filesystem::path& out_dir, std::string manifest_name = "manifest.jsonl");
    void add(const QARecord& record);
    void close();
    const ManifestSummary& summary() const { return summary_; }

private:
    std::filesystem::path dir_;
    std::filesystem::path path_;
    std::ofstream out_;
    ManifestSummary summary_;
};

ManifestSummary write_manifest(std::span<const QARecord> records, const std::filesystem::path& out_dir);

std::string format_summary_table(const ManifestSummary& s);

} // namespace tsvlm
