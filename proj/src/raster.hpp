// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace tsvlm::raster {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

struct PointF {
    double x = 0.0, y = 0.0;
};

class Canvas {
public:
    Canvas(int width, int height, Rgb background);

    int width() const { return width_; }
    int height() const { return height_; }
    const std::vector<std::uint8_t>& rgb() const { return rgb_; }

    void set(int x, int y, Rgb c);
    void blend(int x, int y, Rgb c, double alpha);
    void fill_rect(int x0, int y0, int x1, int y1, Rgb c);  // half-open
    void hline(int x0, int x1, int y, Rgb c);
    void vline(int x, int y0, int y1, Rgb c);

    // Anti-aliased polyline of the given stroke width; joints are not double
    // counted.
    void polyline(std::span<const PointF> pts, double stroke, Rgb c);

    // Embedded 5x7 font: digits, '.', '-'. Other characters render blank.
    void text(int x, int y, std::string_view s, int scale, Rgb c);
    static int text_width(std::string_view s, int scale);
    static int text_height(int scale) { return 7 * scale; }

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> rgb_;
};

// Deterministic PNG: 8-bit RGB, no interlace, no timestamps or text chunks.
std::vector<std::uint8_t> encode_png(const Canvas& canvas);

} // namespace tsvlm::raster
