#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ofdmsync {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Unitary N-point DFT pair (1/sqrt(N) on both directions), so the pair preserves energy.
///   inverse: x(n) = 1/sqrt(N) sum_k X(k) exp(+j 2 pi k n / N)
///   forward: X(k) = 1/sqrt(N) sum_n x(n) exp(-j 2 pi k n / N)
/// Plans are built once per size and shared; execute() is safe to call concurrently.
class UnitaryDft {
public:
    explicit UnitaryDft(int size);

    int size() const noexcept { return size_; }
    void forward(std::span<const cplx> in, std::span<cplx> out) const;
    void inverse(std::span<const cplx> in, std::span<cplx> out) const;
    cvec forward(std::span<const cplx> in) const;
    cvec inverse(std::span<const cplx> in) const;

private:
    int size_;
    void* forward_plan_;
    void* inverse_plan_;
    double scale_;
};

}  // namespace ofdmsync
