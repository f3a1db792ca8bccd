// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace tsvlm {

enum class RenderStyle { Line, LineStft };

std::string_view to_string(RenderStyle s);
RenderStyle render_style_from_string(std::string_view s);

struct RenderSpec {
    int canonical_length = 200;
    int image_width = 800;
    int image_height = 400;
    RenderStyle style = RenderStyle::Line;
    int stft_window = 64;
    int stft_hop = 16;

    void validate() const;
    friend bool operator==(const RenderSpec&, const RenderSpec&) = default;
};

struct ImageArtifact {
    std::vector<std::uint8_t> png;
    int width = 0;
    int height = 0;
    int source_length = 0;
    int canonical_length = 0;
    // canonical_length / source_length
    double rescale_factor = 1.0;
};

// Population z-score; constant input maps to zeros.
std::vector<double> zscore(std::span<const double> values);

// Plotting commands of the line panel, before rasterization.
struct LinePlot {
    std::vector<double> xs;  // index * rescale_factor
    std::vector<double> ys;  // z-scored values, untouched
    double x_extent = 0.0;   // canonical_length
    double y_min = 0.0;
    double y_max = 0.0;
    double rescale_factor = 1.0;
};
LinePlot build_line_plot(std::span<const double> values, const RenderSpec& spec);

std::vector<double> hann_window(int size);

struct Spectrogram {
    int window = 0;
    int hop = 0;
    int frames = 0;
    int bins = 0;                  // window / 2 + 1
    std::vector<int> offsets;      // first sample of each frame
    std::vector<double> magnitude; // frames x bins, row-major

    double at(int frame, int bin) const { return magnitude[static_cast<std::size_t>(frame) * bins + bin]; }
};
// Hann-tapered short-time DFT magnitudes. Throws InvalidArgument when the
// window is longer than the series.
Spectrogram stft_magnitude(std::span<const double> values, int window, int hop);

ImageArtifact render_line(std::span<const double> values, const RenderSpec& spec);
ImageArtifact render_composite(std::span<const double> values, const RenderSpec& spec);
// Dispatches on spec.style.
ImageArtifact render(std::span<const double> values, const RenderSpec& spec);

struct DecodedImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;
};
// Throws IoError when the bytes are not a readable PNG.
DecodedImage decode_png(std::span<const std::uint8_t> png);

} // namespace tsvlm
