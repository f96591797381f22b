#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "ofdmsync/dvbt_params.hpp"
#include "ofdmsync/timing_sync.hpp"
#include "ofdmsync/txchain.hpp"

namespace ofdmsync {

/// Demodulated carriers of one symbol, indexed by k - k_min.
struct RxSymbol {
    cvec carriers;
    int symbol_index_l = 0;
};

/// Discards the CP, applies the unitary forward DFT and extracts the active bins. A nonzero
/// derotate_delta multiplies carrier k' by exp(-j 2 pi k' derotate_delta / N), undoing the
/// rotation of a DFT window that started derotate_delta samples late (negative: early).
RxSymbol demodulate_symbol(const DvbtConfig& config, std::span<const cplx> time_samples, std::int64_t derotate_delta);

/// How a frame receiver uses a timing estimate.
///  - no estimate: slice at the stream origin.
///  - estimate, derotate == false: re-originate the stream at the estimated boundary (time domain).
///  - estimate, derotate == true: keep the nominal window and remove the estimated window offset's
///    phase ramp per carrier (frequency domain only).
/// Estimates are read through TimingEstimate::signed_delta().
std::vector<RxSymbol> receive_frame_symbols(const DvbtConfig& config, const SampleStream& stream,
                                            const std::optional<TimingEstimate>& estimate, bool derotate);

/// receive_frame_symbols followed by hard 4-QAM demapping, bits in transmit order.
Bits receive_frame(const DvbtConfig& config, const SampleStream& stream, const std::optional<TimingEstimate>& estimate,
                   bool derotate);

/// CSV "re,im,k_prime,l", one row per carrier.
void write_constellation_csv(std::ostream& out, const DvbtConfig& config, std::span<const RxSymbol> symbols);

}  // namespace ofdmsync
