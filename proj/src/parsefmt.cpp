// SPDX-License-Identifier: Apache-2.0
#include "tsvlm/parsefmt.hpp"

#include <algorithm>
#include <charconv>
#include <climits>
#include <cmath>

#include <fmt/format.h>

#include "tsvlm/error.hpp"

namespace tsvlm {

namespace {

constexpr std::string_view kBoxed = "boxed{";
constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Cursor {
public:
    Cursor(std::string_view s, std::size_t pos) : s_(s), pos_(pos) {}

    void skip_ws() {
        while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
    }
    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) fail(fmt::format("expected '{}'", c));
    }

    double number() {
        skip_ws();
        const std::size_t begin = pos_;
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
        const std::size_t digits_begin = pos_;
        bool any = false;
        while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_, any = true;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && is_digit(s_[pos_])) ++pos_, any = true;
        }
        if (!any) fail("expected a number");
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
            if (p < s_.size() && is_digit(s_[p])) {
                while (p < s_.size() && is_digit(s_[p])) ++p;
                pos_ = p;
            }
        }
        double value = 0.0;
        const char* first = s_.data() + digits_begin;
        const char* last = s_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last || !std::isfinite(value)) fail("number out of range");
        return s_[begin] == '-' ? -value : value;
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw ParseError(fmt::format("malformed boxed interval list at offset {}: {}", pos_, why));
    }

private:
    std::string_view s_;
    std::size_t pos_;
};

int to_index(double v, int canonical_length) {
    const double r = std::round(v);
    return static_cast<int>(std::clamp(r, 0.0, static_cast<double>(canonical_length - 1)));
}

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
    std::size_t n = 0;
    for (std::size_t p = text.find(needle); p != std::string_view::npos; p = text.find(needle, p + needle.size())) ++n;
    return n;
}

} // namespace

PredictedIntervals parse_boxed_intervals(std::string_view text, int canonical_length) {
    if (canonical_length < 1) throw InvalidArgument("canonical_length must be positive");
    const std::size_t at = text.rfind(kBoxed);
    if (at == std::string_view::npos) throw ParseError("response contains no boxed{...} group");

    PredictedIntervals out;
    out.raw = std::string(text);
    Cursor cur(text, at + kBoxed.size());
    cur.expect('[');
    if (!cur.accept(']')) {
        for (;;) {
            cur.expect('[');
            const double a = cur.number();
            cur.expect(',');
            const double b = cur.number();
            cur.accept(',');
            cur.expect(']');
            int s = to_index(a, canonical_length);
            int e = to_index(b, canonical_length);
            if (s > e) std::swap(s, e);
            out.intervals.push_back({s, e});
            if (cur.accept(',')) {
                if (cur.accept(']')) break;
                continue;
            }
            cur.expect(']');
            break;
        }
    }
    cur.expect('}');
    return out;
}

std::optional<PredictedIntervals> try_parse_boxed_intervals(std::string_view text, int canonical_length) {
    try {
        return parse_boxed_intervals(text, canonical_length);
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

int check_format(std::string_view text) {
    if (count_occurrences(text, kThinkOpen) != 1 || count_occurrences(text, kThinkClose) != 1) return 0;
    const std::size_t open = text.find(kThinkOpen);
    const std::size_t close = text.find(kThinkClose);
    if (close < open + kThinkOpen.size()) return 0;
    const std::size_t boxed = text.rfind(kBoxed);
    if (boxed == std::string_view::npos || boxed < close + kThinkClose.size()) return 0;
    return try_parse_boxed_intervals(text.substr(close + kThinkClose.size()), INT_MAX) ? 1 : 0;
}

std::string to_boxed(std::span<const Segment> intervals) {
    std::string out = "boxed{[";
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (i) out += ", ";
        out += fmt::format("[{}, {}]", intervals[i].start, intervals[i].end);
    }
    out += "]}";
    return out;
}

} // namespace tsvlm
