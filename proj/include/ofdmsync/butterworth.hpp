#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ofdmsync {

/// Digital Butterworth low-pass obtained from the analog prototype by the bilinear transform
/// with cutoff pre-warping. Realized as cascaded second-order sections (plus one first-order
/// section for odd orders), unity gain at DC.
class ButterworthLowpass {
public:
    struct Section {
        double b0, b1, b2;
        double a1, a2;  // a0 == 1
    };

    ButterworthLowpass(int order, double cutoff_hz, double sample_rate_hz);

    int order() const noexcept { return order_; }
    double cutoff_hz() const noexcept { return cutoff_hz_; }
    double sample_rate_hz() const noexcept { return sample_rate_hz_; }
    const std::vector<Section>& sections() const noexcept { return sections_; }

    /// Frequency response H(e^{j 2 pi f / fs}).
    std::complex<double> response(double f_hz) const;

    /// Zero initial state. Real coefficients, so complex input filters I and Q independently.
    std::vector<std::complex<double>> filter(std::span<const std::complex<double>> x) const;
    std::vector<double> filter(std::span<const double> x) const;

private:
    int order_;
    double cutoff_hz_;
    double sample_rate_hz_;
    std::vector<Section> sections_;
};

}  // namespace ofdmsync
