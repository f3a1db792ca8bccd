// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "tsvlm/error.hpp"
#include "tsvlm/evalkit.hpp"

namespace tsvlm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r\"");
        const auto e = cell.find_last_not_of(" \t\r\"");
        cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::optional<double> to_number(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return v;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

} // namespace

double default_test_fraction(const std::string& dataset_name) {
    const std::string n = lower(dataset_name);
    if (n == "yahoo") return 0.5;
    if (n == "kpi" || n == "wsd") return 0.2;
    return 1.0;
}

DatasetSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open series file", path.string());
    DatasetSeries s;
    s.id = path.stem().string();
    std::string line;
    int value_col = -1, label_col = -1;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (value_col < 0) {
            // First non-blank line decides the layout: a header names the
            // columns, otherwise the last two columns are value and label.
            bool header = false;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                const auto name = lower(cells[i]);
                if (name == "value") value_col = static_cast<int>(i), header = true;
                if (name == "label" || name == "is_anomaly" || name == "anomaly") label_col = static_cast<int>(i), header = true;
            }
            if (header) {
                if (value_col < 0 || label_col < 0)
                    throw IoError("header must name both value and label columns", path.string());
                continue;
            }
            if (cells.size() < 2 || cells.size() > 3)
                throw IoError(fmt::format("expected 2 or 3 columns, found {}", cells.size()), path.string());
            value_col = static_cast<int>(cells.size()) - 2;
            label_col = static_cast<int>(cells.size()) - 1;
        }
        if (static_cast<int>(cells.size()) <= std::max(value_col, label_col))
            throw IoError(fmt::format("line {} has too few columns", line_no), path.string());
        const auto v = to_number(cells[value_col]);
        const auto l = to_number(cells[label_col]);
        if (!v || !l || !std::isfinite(*v))
            throw IoError(fmt::format("line {} is not numeric", line_no), path.string());
        s.values.push_back(*v);
        s.labels.push_back(*l != 0.0 ? 1 : 0);
    }
    return s;
}

Dataset load_dataset(const std::filesystem::path& dir, std::optional<double> test_fraction) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) throw IoError("dataset directory not found", dir.string());
    Dataset ds;
    ds.name = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
    const double frac = test_fraction.value_or(default_test_fraction(ds.name));
    if (!(frac > 0.0 && frac <= 1.0)) throw InvalidArgument("test fraction must lie in (0, 1]");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        auto s = read_series_csv(f);
        const auto n = s.values.size();
        const auto keep = static_cast<std::size_t>(std::lround(static_cast<double>(n) * frac));
        const auto cut = n - std::min(keep, n);
        s.values.erase(s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(cut));
        s.labels.erase(s.labels.begin(), s.labels.begin() + static_cast<std::ptrdiff_t>(cut));
        ds.series.push_back(std::move(s));
    }
    return ds;
}

void write_cdf_csv(std::span<const CdfPoint> cdf, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write CDF file", path.string());
    out << "distance,cumulative_fraction\n";
    for (const auto& p : cdf) out << fmt::format("{},{}\n", p.distance, p.fraction);
    if (!out) throw IoError("write failed", path.string());
}

} // namespace tsvlm
