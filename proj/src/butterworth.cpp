#include "ofdmsync/butterworth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ofdmsync {
namespace {

template <typename T>
std::vector<T> run_sections(const std::vector<ButterworthLowpass::Section>& sections, std::span<const T> x) {
    std::vector<T> y(x.begin(), x.end());
    for (const auto& s : sections) {
        // transposed direct form II
        T w1{}, w2{};
        for (auto& v : y) {
            const T in = v;
            const T out = s.b0 * in + w1;
            w1 = s.b1 * in - s.a1 * out + w2;
            w2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
    return y;
}

}  // namespace

ButterworthLowpass::ButterworthLowpass(int order, double cutoff_hz, double sample_rate_hz)
    : order_(order), cutoff_hz_(cutoff_hz), sample_rate_hz_(sample_rate_hz) {
    if (order < 1) {
        throw std::invalid_argument("Butterworth order must be >= 1");
    }
    if (!(sample_rate_hz > 0) || !(cutoff_hz > 0) || !(cutoff_hz < sample_rate_hz / 2)) {
        throw std::invalid_argument("Butterworth cutoff must lie in (0, fs/2)");
    }
    using std::numbers::pi;
    const double k = 2.0 * sample_rate_hz;
    const double wc = k * std::tan(pi * cutoff_hz / sample_rate_hz);

    for (int i = 0; i < order / 2; ++i) {
        const double theta = pi * (2.0 * i + 1.0 + order) / (2.0 * order);
        const std::complex<double> s = wc * std::polar(1.0, theta);
        const std::complex<double> z = (k + s) / (k - s);
        const double a1 = -2.0 * z.real();
        const double a2 = std::norm(z);
        const double g = (1.0 + a1 + a2) / 4.0;
        sections_.push_back({g, 2.0 * g, g, a1, a2});
    }
    if (order % 2 == 1) {
        const double z = (k - wc) / (k + wc);
        const double g = (1.0 - z) / 2.0;
        sections_.push_back({g, g, 0.0, -z, 0.0});
    }
}

std::complex<double> ButterworthLowpass::response(double f_hz) const {
    const auto zinv = std::polar(1.0, -2.0 * std::numbers::pi * f_hz / sample_rate_hz_);
    std::complex<double> h = 1.0;
    for (const auto& s : sections_) {
        h *= (s.b0 + zinv * (s.b1 + zinv * s.b2)) / (1.0 + zinv * (s.a1 + zinv * s.a2));
    }
    return h;
}

std::vector<std::complex<double>> ButterworthLowpass::filter(std::span<const std::complex<double>> x) const {
    return run_sections(sections_, x);
}

std::vector<double> ButterworthLowpass::filter(std::span<const double> x) const {
    return run_sections(sections_, x);
}

}  // namespace ofdmsync
