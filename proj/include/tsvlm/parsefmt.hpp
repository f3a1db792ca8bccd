// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsvlm/types.hpp"

namespace tsvlm {

struct PredictedIntervals {
    std::vector<Segment> intervals;
    std::string raw;
};

// Reads the last `boxed{...}` group of a model response. Endpoints are
// rounded half away from zero, clamped to [0, canonical_length - 1] and
// reversed pairs are swapped. Throws ParseError when no group exists or the
// list inside it is malformed; `boxed{[]}` is a valid empty prediction.
PredictedIntervals parse_boxed_intervals(std::string_view text, int canonical_length);

// Non-throwing form: nullopt on ParseError.
std::optional<PredictedIntervals> try_parse_boxed_intervals(std::string_view text, int canonical_length);

// 1 iff the text holds exactly one <think>...</think> pair followed by a
// parseable boxed interval list.
int check_format(std::string_view text);

// "boxed{[[a, b], [c, d]]}"
std::string to_boxed(std::span<const Segment> intervals);

} // namespace tsvlm
