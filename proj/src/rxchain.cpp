#include "ofdmsync/rxchain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ofdmsync/channel.hpp"
#include "ofdmsync/keyvalue.hpp"

namespace ofdmsync {

RxSymbol demodulate_symbol(const DvbtConfig& config, std::span<const cplx> time_samples, std::int64_t derotate_delta) {
    const int n = config.fft_size;
    const int ng = config.guard_samples;
    if (static_cast<int>(time_samples.size()) != n + ng) {
        throw std::invalid_argument("symbol needs " + std::to_string(n + ng) + " samples, got " +
                                    std::to_string(time_samples.size()));
    }
    const UnitaryDft dft(n);
    const cvec bins = dft.forward(time_samples.subspan(ng));

    RxSymbol rx;
    rx.carriers.resize(config.active_carriers);
    for (int i = 0; i < config.active_carriers; ++i) {
        const int k = config.k_min + i;
        cplx v = bins[carrier_to_bin(config, k)];
        if (derotate_delta != 0) {
            v *= std::polar(1.0, -phase_rotation(config, derotate_delta, carrier_relative_index(config, k)));
        }
        rx.carriers[i] = v;
    }
    return rx;
}

std::vector<RxSymbol> receive_frame_symbols(const DvbtConfig& config, const SampleStream& stream,
                                            const std::optional<TimingEstimate>& estimate, bool derotate) {
    const SampleStream* source = &stream;
    SampleStream realigned;
    std::int64_t window_offset = 0;
    if (estimate) {
        const std::int64_t shift = estimate->signed_delta();
        if (derotate) {
            window_offset = -shift;
        } else if (shift >= 0) {
            TimingEstimate positive = *estimate;
            positive.delta_hat = shift;
            realigned = correct_timing(stream, positive);
            source = &realigned;
        } else {
            // boundary precedes sample 0: re-originate by padding in front
            realigned = apply_timing_offset(stream, -shift);
            source = &realigned;
        }
    }

    const std::int64_t period = config.symbol_samples();
    const std::int64_t start = source->origin_index;
    const std::int64_t needed = start + period * config.symbols_per_frame;
    if (start < 0 || static_cast<std::int64_t>(source->size()) < needed) {
        throw std::invalid_argument("stream holds " + std::to_string(source->size()) + " samples, a frame from origin " +
                                    std::to_string(start) + " needs " + std::to_string(needed));
    }

    std::vector<RxSymbol> out;
    out.reserve(config.symbols_per_frame);
    const std::span<const cplx> all(source->samples);
    for (int l = 0; l < config.symbols_per_frame; ++l) {
        auto sym = demodulate_symbol(config, all.subspan(start + l * period, period), window_offset);
        sym.symbol_index_l = l;
        out.push_back(std::move(sym));
    }
    return out;
}

Bits receive_frame(const DvbtConfig& config, const SampleStream& stream, const std::optional<TimingEstimate>& estimate,
                   bool derotate) {
    const auto symbols = receive_frame_symbols(config, stream, estimate, derotate);
    Bits bits;
    bits.reserve(static_cast<std::size_t>(config.bits_per_frame()));
    for (const auto& sym : symbols) {
        const auto b = demap_qam4(sym.carriers);
        bits.insert(bits.end(), b.begin(), b.end());
    }
    return bits;
}

void write_constellation_csv(std::ostream& out, const DvbtConfig& config, std::span<const RxSymbol> symbols) {
    out << "re,im,k_prime,l\n";
    for (const auto& sym : symbols) {
        for (std::size_t i = 0; i < sym.carriers.size(); ++i) {
            const int k_rel = carrier_relative_index(config, config.k_min + static_cast<int>(i));
            out << format_double(sym.carriers[i].real()) << ',' << format_double(sym.carriers[i].imag()) << ','
                << k_rel << ',' << sym.symbol_index_l << '\n';
        }
    }
}

}  // namespace ofdmsync
