#include "ofdmsync/dft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace ofdmsync {
namespace {

// fftw planning is not thread-safe; plans live for the process lifetime.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::pair<fftw_plan, fftw_plan> plans_for(int n) {
    static std::map<int, std::pair<fftw_plan, fftw_plan>> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto it = cache.find(n);
    if (it != cache.end()) {
        return it->second;
    }
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan fwd = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, flags);
    fftw_plan inv = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
    if (fwd == nullptr || inv == nullptr) {
        throw std::runtime_error("fftw planning failed for size " + std::to_string(n));
    }
    return cache.emplace(n, std::make_pair(fwd, inv)).first->second;
}

void run(void* plan, std::span<const cplx> in, std::span<cplx> out, int n, double scale) {
    if (static_cast<int>(in.size()) != n || static_cast<int>(out.size()) != n) {
        throw std::invalid_argument("DFT buffer length mismatch: expected " + std::to_string(n));
    }
    // fftw_execute_dft never writes its input for out-of-place complex plans.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    if (src == dst) {
        cvec tmp(in.begin(), in.end());
        fftw_execute_dft(static_cast<fftw_plan>(plan), reinterpret_cast<fftw_complex*>(tmp.data()), dst);
    } else {
        fftw_execute_dft(static_cast<fftw_plan>(plan), src, dst);
    }
    for (auto& v : out) {
        v *= scale;
    }
}

}  // namespace

UnitaryDft::UnitaryDft(int size) : size_(size), scale_(1.0 / std::sqrt(static_cast<double>(size))) {
    if (size <= 0) {
        throw std::invalid_argument("DFT size must be positive");
    }
    const auto [fwd, inv] = plans_for(size);
    forward_plan_ = fwd;
    inverse_plan_ = inv;
}

void UnitaryDft::forward(std::span<const cplx> in, std::span<cplx> out) const {
    run(forward_plan_, in, out, size_, scale_);
}

void UnitaryDft::inverse(std::span<const cplx> in, std::span<cplx> out) const {
    run(inverse_plan_, in, out, size_, scale_);
}

cvec UnitaryDft::forward(std::span<const cplx> in) const {
    cvec out(size_);
    forward(in, out);
    return out;
}

cvec UnitaryDft::inverse(std::span<const cplx> in) const {
    cvec out(size_);
    inverse(in, out);
    return out;
}

}  // namespace ofdmsync
