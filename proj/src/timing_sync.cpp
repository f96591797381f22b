#include "ofdmsync/timing_sync.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ofdmsync/keyvalue.hpp"

namespace ofdmsync {
namespace {

void locate_peak(TimingMetricTrace& trace) {
    trace.peak_lag = trace.lags.empty() ? 0 : trace.lags.front();
    trace.peak_value = trace.metric.empty() ? 0.0 : trace.metric.front();
    for (std::size_t i = 1; i < trace.metric.size(); ++i) {
        if (trace.metric[i] > trace.peak_value) {
            trace.peak_value = trace.metric[i];
            trace.peak_lag = trace.lags[i];
        }
    }
}

}  // namespace

std::int64_t TimingEstimate::signed_delta() const noexcept {
    if (trace.period > 0 && 2 * delta_hat > trace.period) {
        return delta_hat - trace.period;
    }
    return delta_hat;
}

TimingMetricTrace cp_timing_metric(const SampleStream& received, const DvbtConfig& config, std::int64_t search_span) {
    const std::int64_t n = config.fft_size;
    const std::int64_t ng = config.guard_samples;
    const auto& r = received.samples;
    if (search_span <= 0) {
        throw std::invalid_argument("search span must be positive");
    }
    if (static_cast<std::int64_t>(r.size()) < search_span + n + ng) {
        throw std::invalid_argument("need at least " + std::to_string(search_span + n + ng) +
                                    " samples for a search span of " + std::to_string(search_span) + ", got " +
                                    std::to_string(r.size()));
    }

    // Prefix sums over i in [0, span + ng) of r(i) conj(r(i+N)) and the half-energy term.
    const std::int64_t terms = search_span + ng;
    std::vector<long double> pre_re(terms + 1), pre_im(terms + 1), pre_e(terms + 1);
    long double acc_re = 0, acc_im = 0, acc_e = 0;
    for (std::int64_t i = 0; i < terms; ++i) {
        const cplx a = r[i];
        const cplx b = r[i + n];
        acc_re += a.real() * b.real() + a.imag() * b.imag();
        acc_im += a.imag() * b.real() - a.real() * b.imag();
        acc_e += 0.5 * (std::norm(a) + std::norm(b));
        pre_re[i + 1] = acc_re;
        pre_im[i + 1] = acc_im;
        pre_e[i + 1] = acc_e;
    }

    TimingMetricTrace trace;
    trace.period = n + ng;
    trace.lags.resize(search_span);
    trace.metric.resize(search_span);
    for (std::int64_t d = 0; d < search_span; ++d) {
        const auto c_re = static_cast<double>(pre_re[d + ng] - pre_re[d]);
        const auto c_im = static_cast<double>(pre_im[d + ng] - pre_im[d]);
        const auto e = static_cast<double>(pre_e[d + ng] - pre_e[d]);
        double m = 0.0;
        if (e > 0.0) {
            m = std::clamp((c_re * c_re + c_im * c_im) / (e * e), 0.0, 1.0);
        }
        trace.lags[d] = d;
        trace.metric[d] = m;
    }
    locate_peak(trace);
    return trace;
}

TimingEstimate estimate_offset(const TimingMetricTrace& trace, int n_symbols_averaged) {
    if (trace.metric.empty()) {
        throw std::invalid_argument("empty timing metric trace");
    }
    if (n_symbols_averaged < 1) {
        throw std::invalid_argument("must average at least one symbol");
    }
    if (trace.period <= 0) {
        throw std::invalid_argument("trace has no symbol period");
    }
    const std::int64_t period = trace.period;
    const std::int64_t needed = period * n_symbols_averaged;
    if (static_cast<std::int64_t>(trace.metric.size()) < needed) {
        throw std::invalid_argument("trace covers " + std::to_string(trace.metric.size()) + " lags, averaging " +
                                    std::to_string(n_symbols_averaged) + " symbols needs " + std::to_string(needed));
    }

    // seam at +-period/2 when the trace is long enough, so lags either side of zero share symbols
    const std::int64_t first = static_cast<std::int64_t>(trace.metric.size()) >= needed + period / 2 ? period / 2 : 0;

    TimingEstimate est;
    est.trace.period = period;
    est.trace.lags.resize(period);
    est.trace.metric.assign(period, 0.0);
    for (std::int64_t i = first; i < first + needed; ++i) {
        const std::int64_t bucket = ((trace.lags[i] % period) + period) % period;
        est.trace.metric[bucket] += trace.metric[i];
    }
    for (std::int64_t d = 0; d < period; ++d) {
        est.trace.lags[d] = d;
        est.trace.metric[d] /= n_symbols_averaged;
    }
    locate_peak(est.trace);
    est.delta_hat = est.trace.peak_lag;
    est.confidence = est.trace.peak_value;
    return est;
}

std::int64_t search_span(const DvbtConfig& config, int n_symbols_averaged, std::size_t stream_length) {
    const std::int64_t period = config.symbol_samples();
    const std::int64_t full = period * n_symbols_averaged + period / 2;
    const std::int64_t window = config.fft_size + config.guard_samples;
    return full + window <= static_cast<std::int64_t>(stream_length) ? full : period * n_symbols_averaged;
}

double phase_rotation(const DvbtConfig& config, std::int64_t delta, int k_prime) {
    return 2.0 * std::numbers::pi * static_cast<double>(k_prime) * static_cast<double>(delta) /
           static_cast<double>(config.fft_size);
}

SampleStream correct_timing(const SampleStream& received, const TimingEstimate& estimate) {
    if (estimate.delta_hat < 0 || estimate.delta_hat >= static_cast<std::int64_t>(received.size())) {
        throw std::out_of_range("timing estimate " + std::to_string(estimate.delta_hat) + " outside the stream");
    }
    SampleStream out;
    out.sample_period_s = received.sample_period_s;
    out.origin_index = received.origin_index;
    out.samples.assign(received.samples.begin() + estimate.delta_hat, received.samples.end());
    return out;
}

void write_trace_csv(std::ostream& out, const TimingMetricTrace& trace) {
    out << "lag,metric\n";
    for (std::size_t i = 0; i < trace.metric.size(); ++i) {
        out << trace.lags[i] << ',' << format_double(trace.metric[i]) << '\n';
    }
}

}  // namespace ofdmsync
