#include "ofdmsync/txchain.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "ofdmsync/butterworth.hpp"
#include "ofdmsync/keyvalue.hpp"

namespace ofdmsync {
namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

}  // namespace

double SampleStream::mean_power() const {
    if (samples.empty()) {
        return 0.0;
    }
    double acc = 0.0;
    for (const auto& s : samples) {
        acc += std::norm(s);
    }
    return acc / static_cast<double>(samples.size());
}

cvec map_bits_qam4(std::span<const std::uint8_t> bits) {
    if (bits.size() % 2 != 0) {
        throw std::invalid_argument("4-QAM mapping needs an even number of bits, got " + std::to_string(bits.size()));
    }
    cvec out(bits.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto b0 = bits[2 * i] & 1u;
        const auto b1 = bits[2 * i + 1] & 1u;
        out[i] = {(b1 ? -kInvSqrt2 : kInvSqrt2), (b0 ? -kInvSqrt2 : kInvSqrt2)};
    }
    return out;
}

Bits demap_qam4(std::span<const cplx> symbols) {
    Bits out(symbols.size() * 2);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        out[2 * i] = symbols[i].imag() < 0.0 ? 1 : 0;
        out[2 * i + 1] = symbols[i].real() < 0.0 ? 1 : 0;
    }
    return out;
}

OfdmSymbol modulate_symbol(const DvbtConfig& config, const QamSymbolBlock& block) {
    if (static_cast<int>(block.carriers.size()) != config.active_carriers) {
        throw std::invalid_argument("symbol block has " + std::to_string(block.carriers.size()) +
                                    " carriers, expected " + std::to_string(config.active_carriers));
    }
    const int n = config.fft_size;
    const int ng = config.guard_samples;

    OfdmSymbol sym;
    sym.freq.assign(n, cplx{});
    for (int i = 0; i < config.active_carriers; ++i) {
        sym.freq[carrier_to_bin(config, config.k_min + i)] = block.carriers[i];
    }
    sym.time.resize(n + ng);
    UnitaryDft dft(n);
    dft.inverse(sym.freq, std::span<cplx>(sym.time).subspan(ng));
    std::copy(sym.time.end() - ng, sym.time.end(), sym.time.begin());
    return sym;
}

SampleStream serialize_frame(const DvbtConfig& config, std::span<const OfdmSymbol> symbols) {
    if (static_cast<int>(symbols.size()) != config.symbols_per_frame) {
        throw std::invalid_argument("a frame holds " + std::to_string(config.symbols_per_frame) + " symbols, got " +
                                    std::to_string(symbols.size()));
    }
    SampleStream stream;
    stream.sample_period_s = config.elementary_period_s;
    stream.origin_index = 0;
    stream.samples.reserve(symbols.size() * config.symbol_samples());
    for (const auto& sym : symbols) {
        if (static_cast<int>(sym.time.size()) != config.symbol_samples()) {
            throw std::invalid_argument("symbol has wrong sample count");
        }
        stream.samples.insert(stream.samples.end(), sym.time.begin(), sym.time.end());
    }
    return stream;
}

SampleStream build_frame(const DvbtConfig& config, std::span<const std::uint8_t> bits, int frame_index) {
    if (static_cast<std::int64_t>(bits.size()) != config.bits_per_frame()) {
        throw std::invalid_argument("frame needs " + std::to_string(config.bits_per_frame()) + " bits, got " +
                                    std::to_string(bits.size()));
    }
    const auto per_symbol = static_cast<std::size_t>(config.bits_per_symbol());
    std::vector<OfdmSymbol> symbols;
    symbols.reserve(config.symbols_per_frame);
    for (int l = 0; l < config.symbols_per_frame; ++l) {
        QamSymbolBlock block{map_bits_qam4(bits.subspan(l * per_symbol, per_symbol)), l, frame_index};
        symbols.push_back(modulate_symbol(config, block));
    }
    return serialize_frame(config, symbols);
}

std::vector<double> to_passband(const SampleStream& stream, const DvbtConfig& config, const PassbandOptions& options) {
    if (options.oversample < 1) {
        throw std::invalid_argument("oversample factor must be >= 1");
    }
    const double t = stream.sample_period_s > 0 ? stream.sample_period_s : config.elementary_period_s;
    const double fs = options.oversample / t;
    const double half_band = 0.5 * config.occupied_bandwidth_hz();
    if (!(fs > 2.0 * (options.carrier_hz + half_band))) {
        throw std::invalid_argument("passband rate " + std::to_string(fs) + " Hz violates Nyquist for carrier " +
                                    std::to_string(options.carrier_hz) + " Hz");
    }
    const double cutoff = options.cutoff_hz > 0 ? options.cutoff_hz : 0.5 / t;
    const ButterworthLowpass lpf(options.filter_order, cutoff, fs);

    cvec up(stream.samples.size() * options.oversample, cplx{});
    for (std::size_t i = 0; i < stream.samples.size(); ++i) {
        up[i * options.oversample] = stream.samples[i] * static_cast<double>(options.oversample);
    }
    const cvec shaped = lpf.filter(up);

    std::vector<double> out(shaped.size());
    const double cycles_per_sample = options.carrier_hz / fs;
    for (std::size_t n = 0; n < shaped.size(); ++n) {
        const double phase = 2.0 * std::numbers::pi * std::fmod(cycles_per_sample * static_cast<double>(n), 1.0);
        out[n] = shaped[n].real() * std::cos(phase) - shaped[n].imag() * std::sin(phase);
    }
    return out;
}

void write_sample_stream(const SampleStream& stream, const std::string& path) {
    static_assert(std::endian::native == std::endian::little, "sample files are little-endian");
    std::ofstream bin(path, std::ios::binary);
    if (!bin) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    bin.write(reinterpret_cast<const char*>(stream.samples.data()),
              static_cast<std::streamsize>(stream.samples.size() * sizeof(cplx)));

    KeyValueMap hdr;
    hdr.set("sample_period_s", format_double(stream.sample_period_s));
    hdr.set("length", std::to_string(stream.samples.size()));
    hdr.set("origin_index", std::to_string(stream.origin_index));
    std::ofstream side(path + ".hdr");
    side << hdr.to_text();
    if (!bin || !side) {
        throw std::runtime_error("write failed for '" + path + "'");
    }
}

SampleStream read_sample_stream(const std::string& path) {
    const auto hdr = KeyValueMap::load(path + ".hdr");
    const auto length = hdr.get_int("length");
    const auto period = hdr.get_double("sample_period_s");
    if (!length || !period || *length < 0) {
        throw std::runtime_error("incomplete sample header for '" + path + "'");
    }
    SampleStream stream;
    stream.sample_period_s = *period;
    stream.origin_index = hdr.get_int("origin_index").value_or(0);
    stream.samples.resize(static_cast<std::size_t>(*length));
    std::ifstream bin(path, std::ios::binary);
    bin.read(reinterpret_cast<char*>(stream.samples.data()),
             static_cast<std::streamsize>(stream.samples.size() * sizeof(cplx)));
    if (!bin || bin.peek() != std::ifstream::traits_type::eof()) {
        throw std::runtime_error("sample file '" + path + "' does not match its header length");
    }
    return stream;
}

}  // namespace ofdmsync
