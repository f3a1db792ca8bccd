// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace tsvlm {

// Real Fourier series on one 2*pi period:
// a0/2 + sum_n a[n-1] cos(n x) + b[n-1] sin(n x)
struct FourierSeries {
    double a0 = 0.0;
    std::vector<double> a;
    std::vector<double> b;
    int order() const { return static_cast<int>(a.size()); }
};

// Coefficients up to `order` from M uniform samples f(2*pi*j/M), j = 0..M-1
// (the rectangle rule, exact for trigonometric polynomials of degree < M/2).
FourierSeries fourier_coefficients(std::span<const double> samples, int order);

double partial_sum(const FourierSeries& s, double x);

// Total variation of the periodic sample sequence, wrap-around included.
double total_variation(std::span<const double> samples);

} // namespace tsvlm
