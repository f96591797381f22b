#pragma once

#include <cstdint>
#include <limits>

#include "ofdmsync/txchain.hpp"

namespace ofdmsync {

inline constexpr double kNoiselessSnr = std::numeric_limits<double>::infinity();

/// snr_db is per-sample signal power over total complex noise power; +inf means noiseless.
struct ChannelSpec {
    double snr_db = kNoiselessSnr;
    std::int64_t timing_offset_samples = 0;
    std::uint64_t rng_seed = 0;
};

/// Delays the stream by prepending delta zeros. origin_index is unchanged, so a receiver slicing
/// at the nominal origin starts reading delta samples before each true symbol boundary.
/// Requires 0 <= delta < stream length.
SampleStream apply_timing_offset(const SampleStream& stream, std::int64_t delta);

/// Opposite direction: drops the first delta samples and pads delta zeros at the end (length kept).
/// A receiver slicing at the nominal origin starts delta samples after each true boundary, so its
/// DFT window takes delta samples from the following symbol.
SampleStream apply_timing_advance(const SampleStream& stream, std::int64_t delta);

/// Adds circular complex Gaussian noise with total variance P / 10^(snr_db/10), P the measured mean
/// power of the input. Deterministic for a given seed. +inf returns the input unchanged.
SampleStream add_awgn(const SampleStream& stream, double snr_db, std::uint64_t seed);

/// offset then noise, as described by `spec`.
SampleStream apply_channel(const SampleStream& stream, const ChannelSpec& spec);

}  // namespace ofdmsync
