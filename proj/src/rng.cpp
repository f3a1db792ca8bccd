// SPDX-License-Identifier: Apache-2.0
#include "tsvlm/rng.hpp"

#include <cmath>
#include <numbers>

#include "tsvlm/error.hpp"

namespace tsvlm {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t item_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index ^ 0xD1B54A32D192ED03ULL));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(seed ^ splitmix64(stream + 0x8CB92BA72F3D8DD7ULL));
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw InvalidArgument("uniform_int: empty range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    // Rejection keeps the draw unbiased.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
}

double Rng::normal(double mean, double stddev) {
    // Box-Muller; u1 in (0, 1] so the log is finite.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

int Rng::weighted_index(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w)) throw InvalidArgument("weighted_index: weights must be finite and non-negative");
        total += w;
    }
    if (total <= 0.0) return -1;
    const double target = uniform01() * total;
    double acc = 0.0;
    int last_positive = -1;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last_positive = static_cast<int>(i);
        acc += weights[i];
        if (target < acc) return static_cast<int>(i);
    }
    return last_positive;
}

} // namespace tsvlm
