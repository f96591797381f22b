#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "ofdmsync/dvbt_params.hpp"
#include "ofdmsync/txchain.hpp"

namespace ofdmsync {

/// Per-lag CP correlation metric M(d) in [0, 1].
struct TimingMetricTrace {
    std::vector<std::int64_t> lags;
    std::vector<double> metric;
    std::int64_t peak_lag = 0;   ///< first lag attaining the maximum
    double peak_value = 0.0;
    std::int64_t period = 0;     ///< symbol period N + N_g the lags are folded on
};

struct TimingEstimate {
    std::int64_t delta_hat = 0;  ///< in [0, period)
    double confidence = 0.0;     ///< peak of the averaged metric
    TimingMetricTrace trace;     ///< averaged (folded) trace, one symbol period long

    /// delta_hat mapped into (-period/2, period/2]; negative means the symbol started before sample 0.
    std::int64_t signed_delta() const noexcept;
};

/// Sliding-window correlation of each candidate CP window with the window N samples later:
///   C(d) = sum_{m<N_g} r(d+m) conj(r(d+m+N))
///   E(d) = sum_{m<N_g} (|r(d+m)|^2 + |r(d+m+N)|^2) / 2
///   M(d) = |C(d)|^2 / E(d)^2,   M = 0 where E(d) = 0
/// for d in [0, search_span). Lags are absolute sample indices of `received`.
/// Window sums are differences of one sequential prefix pass, so every lag's value is fixed
/// regardless of how a caller partitions the lag range.
TimingMetricTrace cp_timing_metric(const SampleStream& received, const DvbtConfig& config, std::int64_t search_span);

/// Averages M over n_symbols_averaged periods, modulo the symbol period, then takes the argmax.
/// Ties resolve to the smallest lag. The averaged lags start at the first lag, or half a period
/// later when the trace holds at least n_symbols_averaged + 1/2 periods; the later start puts the
/// fold seam at +-period/2 so small offsets of either sign are judged on the same symbols.
TimingEstimate estimate_offset(const TimingMetricTrace& trace, int n_symbols_averaged);

/// Lag span to compute for estimate_offset: n_symbols_averaged + 1/2 periods when the stream is
/// long enough, else n_symbols_averaged periods.
std::int64_t search_span(const DvbtConfig& config, int n_symbols_averaged, std::size_t stream_length);

/// Predicted rotation 2 pi k' delta / N of carrier k' when the DFT window starts delta samples
/// after the true useful-part start (delta < 0: early, inside the cyclic prefix).
double phase_rotation(const DvbtConfig& config, std::int64_t delta, int k_prime);

/// Drops the first delta_hat samples so slicing at the origin starts at the estimated boundary.
/// Exact inverse of apply_timing_offset(s, delta) when delta_hat == delta.
SampleStream correct_timing(const SampleStream& received, const TimingEstimate& estimate);

/// CSV with header "lag,metric".
void write_trace_csv(std::ostream& out, const TimingMetricTrace& trace);

}  // namespace ofdmsync
