// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "tsvlm/error.hpp"
#include "tsvlm/render.hpp"
#include "tsvlm/rng.hpp"

using namespace tsvlm;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sine(int n, double period) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) v[t] = std::sin(2.0 * kPi * t / period);
    return v;
}

// Direct Hann-windowed DFT of one frame.
std::vector<double> frame_dft(const std::vector<double>& x, int offset, int window) {
    std::vector<double> out(static_cast<std::size_t>(window / 2 + 1));
    for (int k = 0; k <= window / 2; ++k) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < window; ++j) {
            const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * j / (window - 1));
            acc += w * x[offset + j] * std::polar(1.0, -2.0 * kPi * k * j / window);
        }
        out[k] = std::abs(acc);
    }
    return out;
}

} // namespace

TEST(Zscore, Examples) {
    EXPECT_EQ(zscore(std::vector<double>{1, 1, 1, 1}), (std::vector<double>{0, 0, 0, 0}));
    const auto two = zscore(std::vector<double>{0, 2});
    EXPECT_DOUBLE_EQ(two[0], -1.0);
    EXPECT_DOUBLE_EQ(two[1], 1.0);
    EXPECT_THROW(zscore(std::vector<double>{1.0}), InvalidArgument);
}

TEST(Zscore, MomentsOfRandomVectors) {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(200);
        for (auto& x : v) x = rng.normal(3.0, 7.0);
        const auto z = zscore(v);
        const double mean = std::accumulate(z.begin(), z.end(), 0.0) / 200.0;
        double ss = 0.0;
        for (double x : z) ss += (x - mean) * (x - mean);
        EXPECT_LT(std::abs(mean), 1e-9);
        EXPECT_LT(std::abs(std::sqrt(ss / 200.0) - 1.0), 1e-9);
    }
}

TEST(LinePlot, DownsampledIndexAxis) {
    RenderSpec spec;
    const auto values = sine(800, 50.0);
    const auto plot = build_line_plot(values, spec);
    EXPECT_DOUBLE_EQ(plot.rescale_factor, 0.25);
    EXPECT_DOUBLE_EQ(plot.x_extent, 200.0);
    ASSERT_EQ(plot.xs.size(), 800u);
    EXPECT_EQ(plot.xs[0], 0.0);
    EXPECT_EQ(plot.xs[1], 0.25);
    EXPECT_EQ(plot.xs[4], 1.0);
    EXPECT_EQ(plot.xs[799], 199.75);
    EXPECT_EQ(plot.ys, zscore(values));
}

TEST(LinePlot, RescaleInvariants) {
    RenderSpec spec;
    EXPECT_DOUBLE_EQ(build_line_plot(sine(200, 20.0), spec).rescale_factor, 1.0);
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(2, 3000));
        std::vector<double> v(static_cast<std::size_t>(n));
        for (auto& x : v) x = rng.normal(0.0, 1.0) * 100.0;
        const auto plot = build_line_plot(v, spec);
        EXPECT_NEAR(plot.rescale_factor * n, 200.0, 1e-9);
        EXPECT_EQ(plot.ys, zscore(v));
        EXPECT_LE(plot.y_min, *std::min_element(plot.ys.begin(), plot.ys.end()));
        EXPECT_GE(plot.y_max, *std::max_element(plot.ys.begin(), plot.ys.end()));
    }
}

TEST(Stft, MatchesDirectDft) {
    Rng rng(6);
    std::vector<double> x(150);
    for (auto& v : x) v = rng.normal(0.0, 1.0);
    const auto s = stft_magnitude(x, 32, 8);
    EXPECT_EQ(s.bins, 17);
    ASSERT_EQ(s.frames, static_cast<int>(s.offsets.size()));
    for (int f = 0; f < s.frames; ++f) {
        const auto ref = frame_dft(x, s.offsets[f], 32);
        for (int b = 0; b < s.bins; ++b) EXPECT_NEAR(s.at(f, b), ref[b], 1e-9);
    }
    EXPECT_EQ(s.offsets.front(), 0);
    EXPECT_LE(s.offsets.back() + 32, 150);
    EXPECT_THROW(stft_magnitude(x, 200, 8), InvalidArgument);
}

TEST(Stft, PureSinePeaksAtItsFrequency) {
    const auto s = stft_magnitude(sine(200, 20.0), 64, 16);
    const double expected_bin = 64.0 / 20.0;
    for (int f = 0; f < s.frames; ++f) {
        int best = 0;
        for (int b = 1; b < s.bins; ++b)
            if (s.at(f, b) > s.at(f, best)) best = b;
        EXPECT_LE(std::abs(best - expected_bin), 1.0);
    }
}

TEST(Stft, ConstantInputIsDc) {
    const std::vector<double> c(200, 2.5);
    const auto s = stft_magnitude(c, 64, 16);
    for (int f = 0; f < s.frames; ++f) {
        // The Hann taper's own mainlobe reaches bin 1; everything else is
        // leakage.
        double total = 0.0;
        for (int b = 0; b < s.bins; ++b) total += s.at(f, b) * s.at(f, b);
        for (int b = 1; b < s.bins; ++b) EXPECT_LT(s.at(f, b), s.at(f, 0));
        EXPECT_GT(s.at(f, 0) * s.at(f, 0), 0.6 * total);
    }
}

TEST(Render, DeterministicPng) {
    RenderSpec spec;
    const auto v = sine(200, 37.0);
    const auto a = render_line(v, spec);
    const auto b = render_line(v, spec);
    EXPECT_EQ(a.png, b.png);
    const auto img = decode_png(a.png);
    EXPECT_EQ(img.width, 800);
    EXPECT_EQ(img.height, 400);
    EXPECT_EQ(a.canonical_length, 200);
    EXPECT_EQ(a.source_length, 200);
    // Something dark was drawn.
    std::size_t dark = 0;
    for (std::size_t i = 0; i + 2 < img.rgb.size(); i += 3)
        dark += img.rgb[i] < 100 && img.rgb[i + 1] < 100 && img.rgb[i + 2] > 100;
    EXPECT_GT(dark, 500u);
}

TEST(Render, CompositeStacksTwoPanels) {
    RenderSpec spec;
    spec.style = RenderStyle::LineStft;
    const auto v = sine(200, 20.0);
    const auto comp = render(v, spec);
    EXPECT_EQ(comp.png, render_composite(v, spec).png);
    const auto img = decode_png(comp.png);
    EXPECT_EQ(img.width, 800);
    EXPECT_EQ(img.height, 800);
    EXPECT_GT(img.height, decode_png(render_line(v, spec).png).height);
    spec.style = RenderStyle::Line;
    EXPECT_THROW(render_composite(v, spec), InvalidArgument);
    spec.style = RenderStyle::LineStft;
    EXPECT_THROW(render_composite(sine(40, 10.0), spec), InvalidArgument);
}

TEST(Render, ErrorsAndStyleNames) {
    RenderSpec spec;
    EXPECT_THROW(render_line(std::vector<double>{}, spec), InvalidArgument);
    EXPECT_THROW(decode_png(std::vector<std::uint8_t>{1, 2, 3}), IoError);
    EXPECT_EQ(render_style_from_string(to_string(RenderStyle::LineStft)), RenderStyle::LineStft);
    EXPECT_THROW(render_style_from_string("wavelet"), InvalidArgument);
    spec.stft_hop = 100;
    EXPECT_THROW(spec.validate(), InvalidArgument);
}
