// SPDX-License-Identifier: Apache-2.0
#include "tsvlm/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "raster.hpp"
#include "tsvlm/error.hpp"

namespace tsvlm {

namespace {

using raster::Canvas;
using raster::PointF;
using raster::Rgb;

constexpr Rgb kBackground{255, 255, 255};
constexpr Rgb kGrid{225, 225, 225};
constexpr Rgb kAxis{60, 60, 60};
constexpr Rgb kLabel{40, 40, 40};
constexpr Rgb kSeries{25, 55, 140};
constexpr int kFontScale = 2;
constexpr double kStroke = 2.0;

struct Margins {
    int left = 80;
    int right = 20;
    int top = 16;
    int bottom = 36;
};

// Pixel rectangle of a plot panel and its data-to-pixel transform.
struct Panel {
    int x0, y0, x1, y1;  // inclusive pixel bounds of the plot area
    double data_x_extent;
    double data_y_min, data_y_max;

    double px(double x) const { return x0 + x / data_x_extent * (x1 - x0); }
    double py(double y) const { return y1 - (y - data_y_min) / (data_y_max - data_y_min) * (y1 - y0); }
};

double nice_step(double span, int target_ticks) {
    const double raw = span / std::max(target_ticks, 1);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double nice = 10.0;
    if (norm <= 1.0) nice = 1.0;
    else if (norm <= 2.0) nice = 2.0;
    else if (norm <= 5.0) nice = 5.0;
    return nice * mag;
}

std::string tick_label(double v, double step) {
    int decimals = 0;
    while (decimals < 6) {
        const double scaled = step * std::pow(10.0, decimals);
        if (std::abs(scaled - std::round(scaled)) < 1e-6 * std::max(1.0, scaled)) break;
        ++decimals;
    }
    if (std::abs(v) < step * 1e-6) v = 0.0;
    return fmt::format("{:.{}f}", v, decimals);
}

void draw_x_axis(Canvas& c, const Panel& p, bool with_grid) {
    const double step = nice_step(p.data_x_extent, 8);
    for (double x = 0.0; x <= p.data_x_extent + step * 1e-9; x += step) {
        const int px = static_cast<int>(std::lround(p.px(x)));
        if (with_grid) c.vline(px, p.y0, p.y1, kGrid);
        c.vline(px, p.y1, p.y1 + 4, kAxis);
        const auto s = tick_label(x, step);
        c.text(px - Canvas::text_width(s, kFontScale) / 2, p.y1 + 8, s, kFontScale, kLabel);
    }
}

void draw_y_axis(Canvas& c, const Panel& p, double step) {
    const double first = std::ceil(p.data_y_min / step) * step;
    for (double y = first; y <= p.data_y_max + step * 1e-9; y += step) {
        const int py = static_cast<int>(std::lround(p.py(y)));
        c.hline(p.x0, p.x1, py, kGrid);
        c.hline(p.x0 - 4, p.x0, py, kAxis);
        const auto s = tick_label(y, step);
        c.text(p.x0 - 8 - Canvas::text_width(s, kFontScale), py - Canvas::text_height(kFontScale) / 2, s, kFontScale,
               kLabel);
    }
}

void draw_frame(Canvas& c, const Panel& p) {
    c.hline(p.x0, p.x1, p.y0, kAxis);
    c.hline(p.x0, p.x1, p.y1, kAxis);
    c.vline(p.x0, p.y0, p.y1, kAxis);
    c.vline(p.x1, p.y0, p.y1, kAxis);
}

void draw_line_panel(Canvas& c, const Panel& p, const LinePlot& plot) {
    draw_y_axis(c, p, nice_step(p.data_y_max - p.data_y_min, 6));
    draw_x_axis(c, p, true);
    std::vector<PointF> pts(plot.xs.size());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {p.px(plot.xs[i]), p.py(plot.ys[i])};
    c.polyline(pts, kStroke, kSeries);
    draw_frame(c, p);
}

// Piecewise-linear ramp through dark blue, teal, green and yellow.
Rgb heat(double t) {
    static constexpr std::array<Rgb, 5> stops{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(t), stops.size() - 2);
    const double f = t - static_cast<double>(i);
    const auto lerp = [f](std::uint8_t a, std::uint8_t b) { return static_cast<std::uint8_t>(std::lround(a + (b - a) * f)); };
    return {lerp(stops[i].r, stops[i + 1].r), lerp(stops[i].g, stops[i + 1].g), lerp(stops[i].b, stops[i + 1].b)};
}

void draw_spectrogram_panel(Canvas& c, const Panel& p, const Spectrogram& s, double rescale, int source_length) {
    double peak = 0.0;
    for (double m : s.magnitude) peak = std::max(peak, m);
    const double norm = std::log1p(peak);
    for (int f = 0; f < s.frames; ++f) {
        // Each frame owns the hop-wide span around its center; the outer
        // frames extend to the series edges.
        const double center = s.offsets[f] + s.window / 2.0;
        const double lo = f == 0 ? 0.0 : center - s.hop / 2.0;
        const double hi = f == s.frames - 1 ? static_cast<double>(source_length) : center + s.hop / 2.0;
        const int px0 = static_cast<int>(std::lround(p.px(lo * rescale)));
        const int px1 = static_cast<int>(std::lround(p.px(hi * rescale)));
        for (int b = 0; b < s.bins; ++b) {
            const double fy0 = static_cast<double>(b) / s.bins, fy1 = static_cast<double>(b + 1) / s.bins;
            const int py1 = static_cast<int>(std::lround(p.y1 - fy0 * (p.y1 - p.y0)));
            const int py0 = static_cast<int>(std::lround(p.y1 - fy1 * (p.y1 - p.y0)));
            const double t = norm > 0.0 ? std::log1p(s.at(f, b)) / norm : 0.0;
            c.fill_rect(px0, py0, px1, py1, heat(t));
        }
    }
    // Normalized frequency ticks on the left edge.
    for (double fr : {0.0, 0.25, 0.5}) {
        const int py = static_cast<int>(std::lround(p.y1 - fr / 0.5 * (p.y1 - p.y0) * (s.bins - 1.0) / s.bins));
        c.hline(p.x0 - 4, p.x0, py, kAxis);
        const auto str = tick_label(fr, 0.25);
        c.text(p.x0 - 8 - Canvas::text_width(str, kFontScale), py - Canvas::text_height(kFontScale) / 2, str, kFontScale,
               kLabel);
    }
    draw_x_axis(c, p, false);
    draw_frame(c, p);
}

Panel make_panel(const RenderSpec& spec, int top_offset, const LinePlot& plot) {
    Margins m;
    Panel p{};
    p.x0 = m.left;
    p.x1 = spec.image_width - 1 - m.right;
    p.y0 = top_offset + m.top;
    p.y1 = top_offset + spec.image_height - 1 - m.bottom;
    p.data_x_extent = plot.x_extent;
    p.data_y_min = plot.y_min;
    p.data_y_max = plot.y_max;
    return p;
}

ImageArtifact artifact_from(const Canvas& c, const LinePlot& plot, int source_length, int canonical) {
    ImageArtifact a;
    a.png = raster::encode_png(c);
    a.width = c.width();
    a.height = c.height();
    a.source_length = source_length;
    a.canonical_length = canonical;
    a.rescale_factor = plot.rescale_factor;
    return a;
}

} // namespace

std::string_view to_string(RenderStyle s) {
    return s == RenderStyle::Line ? "line" : "line+stft";
}

RenderStyle render_style_from_string(std::string_view s) {
    if (s == "line") return RenderStyle::Line;
    if (s == "line+stft" || s == "line_stft") return RenderStyle::LineStft;
    throw InvalidArgument(fmt::format("unknown render style '{}'", s));
}

void RenderSpec::validate() const {
    if (canonical_length < 16) throw InvalidArgument("canonical_length must be at least 16");
    Margins m;
    if (image_width < m.left + m.right + 16 || image_height < m.top + m.bottom + 16)
        throw InvalidArgument(fmt::format("image size {}x{} too small for the plot margins", image_width, image_height));
    if (stft_window < 2 || stft_hop < 1) throw InvalidArgument("stft window must be >= 2 and hop >= 1");
    if (stft_hop > stft_window) throw InvalidArgument("stft_hop must not exceed stft_window");
}

std::vector<double> zscore(std::span<const double> values) {
    if (values.size() < 2) throw InvalidArgument("zscore needs at least 2 values");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);
    std::vector<double> out(values.size(), 0.0);
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    if (!(sd > 1e-12 * std::max(1.0, scale))) return out;
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sd;
    return out;
}

LinePlot build_line_plot(std::span<const double> values, const RenderSpec& spec) {
    spec.validate();
    if (values.empty()) throw InvalidArgument("cannot plot an empty series");
    LinePlot plot;
    plot.ys = values.size() >= 2 ? zscore(values) : std::vector<double>(values.size(), 0.0);
    plot.rescale_factor = static_cast<double>(spec.canonical_length) / static_cast<double>(values.size());
    plot.x_extent = spec.canonical_length;
    plot.xs.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) plot.xs[i] = static_cast<double>(i) * plot.rescale_factor;
    const auto [lo, hi] = std::minmax_element(plot.ys.begin(), plot.ys.end());
    double ymin = *lo, ymax = *hi;
    if (ymax - ymin < 1e-9) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    const double pad = 0.05 * (ymax - ymin);
    plot.y_min = ymin - pad;
    plot.y_max = ymax + pad;
    return plot;
}

ImageArtifact render_line(std::span<const double> values, const RenderSpec& spec) {
    const LinePlot plot = build_line_plot(values, spec);
    Canvas c(spec.image_width, spec.image_height, kBackground);
    draw_line_panel(c, make_panel(spec, 0, plot), plot);
    return artifact_from(c, plot, static_cast<int>(values.size()), spec.canonical_length);
}

ImageArtifact render_composite(std::span<const double> values, const RenderSpec& spec) {
    if (spec.style != RenderStyle::LineStft) throw InvalidArgument("render_composite needs style line+stft");
    const LinePlot plot = build_line_plot(values, spec);
    if (spec.stft_window > static_cast<int>(values.size()))
        throw InvalidArgument(fmt::format("stft window {} longer than series of length {}", spec.stft_window, values.size()));
    const Spectrogram s = stft_magnitude(plot.ys, spec.stft_window, spec.stft_hop);
    Canvas c(spec.image_width, 2 * spec.image_height, kBackground);
    draw_line_panel(c, make_panel(spec, 0, plot), plot);
    draw_spectrogram_panel(c, make_panel(spec, spec.image_height, plot), s, plot.rescale_factor,
                           static_cast<int>(values.size()));
    return artifact_from(c, plot, static_cast<int>(values.size()), spec.canonical_length);
}

ImageArtifact render(std::span<const double> values, const RenderSpec& spec) {
    return spec.style == RenderStyle::LineStft ? render_composite(values, spec) : render_line(values, spec);
}

} // namespace tsvlm
