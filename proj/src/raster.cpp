// SPDX-License-Identifier: Apache-2.0
#include "raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>

#include <png.h>
#include <zlib.h>

#include "tsvlm/error.hpp"
#include "tsvlm/render.hpp"

namespace tsvlm::raster {

namespace {

struct Glyph {
    char ch;
    std::array<std::uint8_t, 7> rows;  // 5 bits each, MSB on the left
};

constexpr std::array<Glyph, 12> kFont{{
    {'0', {0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110}},
    {'1', {0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110}},
    {'2', {0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111}},
    {'3', {0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110}},
    {'4', {0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010}},
    {'5', {0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110}},
    {'6', {0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110}},
    {'7', {0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000}},
    {'8', {0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110}},
    {'9', {0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100}},
    {'.', {0b00000, 0b00000, 0b00000, 0b00000, 0b00000, 0b01100, 0b01100}},
    {'-', {0b00000, 0b00000, 0b00000, 0b11111, 0b00000, 0b00000, 0b00000}},
}};

const Glyph* find_glyph(char ch) {
    for (const auto& g : kFont)
        if (g.ch == ch) return &g;
    return nullptr;
}

double segment_distance(PointF p, PointF a, PointF b) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    const double qx = a.x + t * dx - p.x, qy = a.y + t * dy - p.y;
    return std::sqrt(qx * qx + qy * qy);
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

} // namespace

Canvas::Canvas(int width, int height, Rgb background) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw InvalidArgument("canvas dimensions must be positive");
    rgb_.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < rgb_.size(); i += 3) {
        rgb_[i] = background.r;
        rgb_[i + 1] = background.g;
        rgb_[i + 2] = background.b;
    }
}

void Canvas::set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
    auto* p = &rgb_[(static_cast<std::size_t>(y) * width_ + x) * 3];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
}

void Canvas::blend(int x, int y, Rgb c, double alpha) {
    if (x < 0 || y < 0 || x >= width_ || y >= height_ || alpha <= 0.0) return;
    alpha = std::min(alpha, 1.0);
    auto* p = &rgb_[(static_cast<std::size_t>(y) * width_ + x) * 3];
    const auto mix = [alpha](std::uint8_t dst, std::uint8_t src) {
        return static_cast<std::uint8_t>(std::lround(dst + (src - dst) * alpha));
    };
    p[0] = mix(p[0], c.r);
    p[1] = mix(p[1], c.g);
    p[2] = mix(p[2], c.b);
}

void Canvas::fill_rect(int x0, int y0, int x1, int y1, Rgb c) {
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, width_);
    y1 = std::min(y1, height_);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) set(x, y, c);
}

void Canvas::hline(int x0, int x1, int y, Rgb c) {
    if (x0 > x1) std::swap(x0, x1);
    for (int x = x0; x <= x1; ++x) set(x, y, c);
}

void Canvas::vline(int x, int y0, int y1, Rgb c) {
    if (y0 > y1) std::swap(y0, y1);
    for (int y = y0; y <= y1; ++y) set(x, y, c);
}

void Canvas::polyline(std::span<const PointF> pts, double stroke, Rgb c) {
    if (pts.empty()) return;
    const double half = stroke / 2.0;
    std::vector<float> coverage(static_cast<std::size_t>(width_) * height_, 0.0f);
    const auto cover_segment = [&](PointF a, PointF b) {
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - half - 1)));
        const int x1 = std::min(width_ - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + half + 1)));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - half - 1)));
        const int y1 = std::min(height_ - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + half + 1)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double d = segment_distance({x + 0.5, y + 0.5}, a, b);
                const auto cov = static_cast<float>(std::clamp(half + 0.5 - d, 0.0, 1.0));
                auto& slot = coverage[static_cast<std::size_t>(y) * width_ + x];
                slot = std::max(slot, cov);
            }
        }
    };
    if (pts.size() == 1) cover_segment(pts[0], pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) cover_segment(pts[i - 1], pts[i]);
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x) {
            const float cov = coverage[static_cast<std::size_t>(y) * width_ + x];
            if (cov > 0.0f) blend(x, y, c, cov);
        }
}

void Canvas::text(int x, int y, std::string_view s, int scale, Rgb c) {
    int cx = x;
    for (char ch : s) {
        if (const Glyph* g = find_glyph(ch)) {
            for (int row = 0; row < 7; ++row)
                for (int col = 0; col < 5; ++col)
                    if (g->rows[row] & (1u << (4 - col))) fill_rect(cx + col * scale, y + row * scale,
                                                                     cx + (col + 1) * scale, y + (row + 1) * scale, c);
        }
        cx += 6 * scale;
    }
}

int Canvas::text_width(std::string_view s, int scale) {
    if (s.empty()) return 0;
    return static_cast<int>(s.size()) * 6 * scale - scale;
}

std::vector<std::uint8_t> encode_png(const Canvas& canvas) {
    std::vector<std::uint8_t> out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png encoder allocation failed", "<memory>");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png encoder allocation failed", "<memory>");
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(canvas.height()));
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png encoding failed", "<memory>");
    }
    png_set_write_fn(png, &out, png_write_to_vector, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(canvas.width()), static_cast<png_uint_32>(canvas.height()), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_set_compression_strategy(png, Z_RLE);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_UP);
    png_write_info(png, info);
    auto* base = const_cast<std::uint8_t*>(canvas.rgb().data());
    for (int y = 0; y < canvas.height(); ++y) rows[y] = base + static_cast<std::size_t>(y) * canvas.width() * 3;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

} // namespace tsvlm::raster

namespace tsvlm {

DecodedImage decode_png(std::span<const std::uint8_t> bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw IoError("not a readable PNG", "<memory>");
    image.format = PNG_FORMAT_RGB;
    DecodedImage out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.rgb.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.rgb.data(), 0, nullptr)) {
        png_image_free(&image);
        throw IoError("corrupt PNG data", "<memory>");
    }
    return out;
}

} // namespace tsvlm
