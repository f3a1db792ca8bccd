// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace tsvlm {

// Name recorded in configs and manifests. The engine's output sequence is
// fixed by the C++ standard; the distributions below are implemented here
// because std:: distributions are implementation-defined.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64";

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Order-independent per-item seed.
std::uint64_t item_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

// Derives an independent stream seed from a parent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // [0, 1) with 53 bits of resolution.
    double uniform01();
    double uniform(double lo, double hi);
    // Inclusive on both ends.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    double normal(double mean, double stddev);
    bool bernoulli(double p) { return uniform01() < p; }

    // Index drawn proportionally to non-negative weights; -1 when all are zero.
    int weighted_index(std::span<const double> weights);

private:
    std::mt19937_64 engine_;
};

} // namespace tsvlm
