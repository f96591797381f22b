#pragma once

// Independent reference computations used only by the tests. Nothing here calls the
// implementation paths it is used to check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// O(N^2) unitary DFT. sign = -1 forward, +1 inverse.
inline std::vector<cplx> naive_dft(const std::vector<cplx>& x, int sign) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc{};
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
            acc += x[t] * cplx{std::cos(ang), std::sin(ang)};
        }
        out[k] = acc * scale;
    }
    return out;
}

/// Literal per-lag CP metric: fresh sums for every lag.
inline double brute_metric(const std::vector<cplx>& r, std::size_t d, std::size_t n, std::size_t ng) {
    cplx c{};
    double e = 0.0;
    for (std::size_t m = 0; m < ng; ++m) {
        c += r[d + m] * std::conj(r[d + m + n]);
        e += 0.5 * (std::norm(r[d + m]) + std::norm(r[d + m + n]));
    }
    return e > 0 ? std::norm(c) / (e * e) : 0.0;
}

/// Upper Gaussian tail Q(x) by composite Simpson quadrature of the density on [x, x + 40].
inline double q_function(double x) {
    const int steps = 200000;
    const double a = x, b = x + 40.0;
    const double h = (b - a) / steps;
    auto pdf = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); };
    double acc = pdf(a) + pdf(b);
    for (int i = 1; i < steps; ++i) {
        acc += (i % 2 ? 4.0 : 2.0) * pdf(a + i * h);
    }
    return acc * h / 3.0;
}

inline std::vector<std::uint8_t> random_bits(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> bits(count);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
    return bits;
}

/// Wrapped phase difference in (-pi, pi].
inline double wrap(double a) {
    while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
    while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

}  // namespace oracle
