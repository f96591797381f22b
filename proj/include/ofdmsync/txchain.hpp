#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ofdmsync/dft.hpp"
#include "ofdmsync/dvbt_params.hpp"

namespace ofdmsync {

using Bits = std::vector<std::uint8_t>;  // one bit per element, values 0/1

/// Complex symbols c_{m,l,k} for one OFDM symbol, indexed by k - k_min.
struct QamSymbolBlock {
    cvec carriers;
    int symbol_index_l = 0;
    int frame_index_m = 0;
};

/// One modulated symbol: N carriers in DFT-bin order and N + N_g time samples (CP first).
struct OfdmSymbol {
    cvec freq;
    cvec time;
};

/// Complex baseband samples. origin_index is the index of the first sample of the first symbol.
struct SampleStream {
    cvec samples;
    double sample_period_s = 0.0;
    std::int64_t origin_index = 0;

    std::size_t size() const noexcept { return samples.size(); }
    double mean_power() const;
};

/// Gray-coded unit-energy 4-QAM. Bit pair (b0, b1) -> ((1 - 2 b1) + j (1 - 2 b0)) / sqrt(2):
/// 00 first quadrant, 01 second, 11 third, 10 fourth (counter-clockwise).
cvec map_bits_qam4(std::span<const std::uint8_t> bits);

/// Hard decision: b1 = (re < 0), b0 = (im < 0). Points on an axis (re or im exactly 0)
/// resolve to the non-negative side, so 0 + 0j demaps to 00.
Bits demap_qam4(std::span<const cplx> symbols);

/// Places carriers on their bins, applies the unitary inverse DFT and prepends the cyclic prefix.
OfdmSymbol modulate_symbol(const DvbtConfig& config, const QamSymbolBlock& block);

/// Concatenates exactly symbols_per_frame symbols in l order. sample_period_s = T, origin 0.
SampleStream serialize_frame(const DvbtConfig& config, std::span<const OfdmSymbol> symbols);

/// map -> modulate -> serialize for one frame; bits.size() must equal config.bits_per_frame().
SampleStream build_frame(const DvbtConfig& config, std::span<const std::uint8_t> bits, int frame_index = 0);

struct PassbandOptions {
    double carrier_hz = 0.0;
    int oversample = 40;
    int filter_order = 13;
    /// Reconstruction low-pass cutoff on each of I and Q; <= 0 selects 1/(2T).
    double cutoff_hz = 0.0;
};

/// Zero-stuffing upsampler (gain = oversample), Butterworth reconstruction filter, real upconversion:
///   y[n] = Re{ s[n] exp(j 2 pi f_c n T / oversample) }.
/// Throws if the output rate cannot represent f_c plus half the occupied bandwidth.
std::vector<double> to_passband(const SampleStream& stream, const DvbtConfig& config, const PassbandOptions& options);

/// Interleaved little-endian float64 (re, im) pairs at `path`, text header at `path + ".hdr"`.
void write_sample_stream(const SampleStream& stream, const std::string& path);
SampleStream read_sample_stream(const std::string& path);

}  // namespace ofdmsync
