// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsvlm/evalkit.hpp"
#include "tsvlm/types.hpp"

namespace tsvlm {

// Exit codes: 0 success, 1 runtime or I/O failure, 2 usage or validation.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args[0] is the program name

struct GeneratedItem {
    std::string id;
    std::string image;  // relative path, empty when images were skipped
    SeriesSpec spec;
    LabeledSeries labeled;
};

// Reads `<dir>/series.jsonl` as written by `gen`.
std::vector<GeneratedItem> read_generated(const std::filesystem::path& dir);
Dataset dataset_from_generated(const std::vector<GeneratedItem>& items, std::string name = "synthetic");

} // namespace tsvlm
