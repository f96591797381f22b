#include "ofdmsync/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ofdmsync {
namespace {

void check_offset(const SampleStream& stream, std::int64_t delta) {
    if (delta < 0 || delta >= static_cast<std::int64_t>(stream.size())) {
        throw std::out_of_range("timing offset " + std::to_string(delta) + " outside [0, " +
                                std::to_string(stream.size()) + ")");
    }
}

}  // namespace

SampleStream apply_timing_offset(const SampleStream& stream, std::int64_t delta) {
    check_offset(stream, delta);
    SampleStream out;
    out.sample_period_s = stream.sample_period_s;
    out.origin_index = stream.origin_index;
    out.samples.reserve(stream.size() + static_cast<std::size_t>(delta));
    out.samples.assign(static_cast<std::size_t>(delta), cplx{});
    out.samples.insert(out.samples.end(), stream.samples.begin(), stream.samples.end());
    return out;
}

SampleStream apply_timing_advance(const SampleStream& stream, std::int64_t delta) {
    check_offset(stream, delta);
    SampleStream out;
    out.sample_period_s = stream.sample_period_s;
    out.origin_index = stream.origin_index;
    out.samples.assign(stream.samples.begin() + delta, stream.samples.end());
    out.samples.resize(stream.size(), cplx{});
    return out;
}

SampleStream add_awgn(const SampleStream& stream, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db) && snr_db > 0) {
        return stream;
    }
    if (std::isnan(snr_db)) {
        throw std::invalid_argument("SNR must not be NaN");
    }
    const double power = stream.mean_power();
    if (!(power > 0)) {
        throw std::invalid_argument("cannot set a finite SNR on a zero-power stream");
    }
    const double sigma2 = power / std::pow(10.0, snr_db / 10.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(sigma2 / 2.0));

    SampleStream out = stream;
    for (auto& s : out.samples) {
        const double re = normal(rng);
        const double im = normal(rng);
        s += cplx{re, im};
    }
    return out;
}

SampleStream apply_channel(const SampleStream& stream, const ChannelSpec& spec) {
    return add_awgn(apply_timing_offset(stream, spec.timing_offset_samples), spec.snr_db, spec.rng_seed);
}

}  // namespace ofdmsync
