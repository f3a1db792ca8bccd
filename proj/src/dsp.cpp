// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "tsvlm/error.hpp"
#include "tsvlm/fourier.hpp"
#include "tsvlm/render.hpp"

namespace tsvlm {

std::vector<double> hann_window(int size) {
    if (size < 1) throw InvalidArgument("hann window size must be positive");
    std::vector<double> w(static_cast<std::size_t>(size), 1.0);
    if (size == 1) return w;
    for (int k = 0; k < size; ++k) w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / (size - 1));
    return w;
}

Spectrogram stft_magnitude(std::span<const double> values, int window, int hop) {
    if (window < 1 || hop < 1) throw InvalidArgument("stft window and hop must be positive");
    if (hop > window) throw InvalidArgument("stft hop must not exceed the window");
    const int n = static_cast<int>(values.size());
    if (window > n) throw InvalidArgument(fmt::format("stft window {} longer than series of length {}", window, n));

    Spectrogram s;
    s.window = window;
    s.hop = hop;
    s.bins = window / 2 + 1;
    for (int off = 0; off + window <= n; off += hop) s.offsets.push_back(off);
    s.frames = static_cast<int>(s.offsets.size());
    s.magnitude.assign(static_cast<std::size_t>(s.frames) * s.bins, 0.0);

    const auto taper = hann_window(window);
    // Twiddle table: cos/sin of 2*pi*j/window.
    std::vector<double> c(static_cast<std::size_t>(window)), sn(static_cast<std::size_t>(window));
    for (int j = 0; j < window; ++j) {
        c[j] = std::cos(2.0 * std::numbers::pi * j / window);
        sn[j] = std::sin(2.0 * std::numbers::pi * j / window);
    }
    std::vector<double> frame(static_cast<std::size_t>(window));
    for (int f = 0; f < s.frames; ++f) {
        for (int k = 0; k < window; ++k) frame[k] = values[s.offsets[f] + k] * taper[k];
        for (int b = 0; b < s.bins; ++b) {
            double re = 0.0, im = 0.0;
            for (int k = 0; k < window; ++k) {
                const int j = static_cast<int>((static_cast<long long>(b) * k) % window);
                re += frame[k] * c[j];
                im -= frame[k] * sn[j];
            }
            s.magnitude[static_cast<std::size_t>(f) * s.bins + b] = std::hypot(re, im);
        }
    }
    return s;
}

} // namespace tsvlm

namespace tsvlm {

FourierSeries fourier_coefficients(std::span<const double> samples, int order) {
    const auto m = static_cast<int>(samples.size());
    if (m < 1) throw InvalidArgument("fourier_coefficients needs samples");
    if (order < 0 || 2 * order >= m) throw InvalidArgument("order must satisfy 0 <= 2*order < samples");
    FourierSeries s;
    s.a.assign(order, 0.0);
    s.b.assign(order, 0.0);
    double sum = 0.0;
    for (double v : samples) sum += v;
    s.a0 = 2.0 * sum / m;
    for (int n = 1; n <= order; ++n) {
        double ca = 0.0, cb = 0.0;
        for (int j = 0; j < m; ++j) {
            const double x = 2.0 * std::numbers::pi * static_cast<double>(j) / m;
            ca += samples[j] * std::cos(n * x);
            cb += samples[j] * std::sin(n * x);
        }
        s.a[n - 1] = 2.0 * ca / m;
        s.b[n - 1] = 2.0 * cb / m;
    }
    return s;
}

double partial_sum(const FourierSeries& s, double x) {
    double v = s.a0 / 2.0;
    for (int n = 1; n <= s.order(); ++n) v += s.a[n - 1] * std::cos(n * x) + s.b[n - 1] * std::sin(n * x);
    return v;
}

double total_variation(std::span<const double> samples) {
    double tv = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) tv += std::abs(samples[(j + 1) % samples.size()] - samples[j]);
    return tv;
}

} // namespace tsvlm
