#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ofdmsync/channel.hpp"
#include "ofdmsync/timing_sync.hpp"
#include "support/oracles.hpp"

using namespace ofdmsync;

namespace {

DvbtConfig cfg(int den) { return make_2k_config(GuardFraction::from_ratio(1, den)); }

SampleStream frame(const DvbtConfig& c, std::uint64_t seed) {
    return build_frame(c, oracle::random_bits(c.bits_per_frame(), seed));
}

TimingMetricTrace synthetic_trace(std::vector<double> m, std::int64_t period) {
    TimingMetricTrace t;
    for (std::size_t i = 0; i < m.size(); ++i) t.lags.push_back(static_cast<std::int64_t>(i));
    t.metric = std::move(m);
    t.period = period;
    return t;
}

}  // namespace

TEST_CASE("noiseless aligned frame peaks at lag 0 with value 1") {
    for (int den : {4, 8, 16, 32}) {
        const auto c = cfg(den);
        const auto tr = cp_timing_metric(frame(c, den), c, c.symbol_samples());
        CHECK(tr.peak_lag == 0);
        CHECK(std::abs(tr.peak_value - 1.0) < 1e-9);
        for (double v : tr.metric) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("metric matches the brute-force per-lag sums") {
    const auto c = cfg(16);
    auto rx = add_awgn(apply_timing_offset(frame(c, 3), 100), 5.0, 8);
    const std::int64_t span = 3 * c.symbol_samples();
    const auto tr = cp_timing_metric(rx, c, span);
    REQUIRE(tr.metric.size() == static_cast<std::size_t>(span));
    double worst = 0;
    for (std::int64_t d = 0; d < span; d += 7) {
        worst = std::max(worst, std::abs(tr.metric[d] - oracle::brute_metric(rx.samples, d, 2048, 128)));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("metric is invariant to a complex scale factor") {
    const auto c = cfg(8);
    auto a = add_awgn(frame(c, 4), 10.0, 1);
    auto b = a;
    for (auto& v : b.samples) v *= cplx{3.0, -2.0};
    const auto ta = cp_timing_metric(a, c, 3000);
    const auto tb = cp_timing_metric(b, c, 3000);
    double worst = 0;
    for (std::size_t i = 0; i < ta.metric.size(); ++i) worst = std::max(worst, std::abs(ta.metric[i] - tb.metric[i]));
    CHECK(worst < 1e-9);
}

TEST_CASE("zero-energy windows give zero metric") {
    const auto c = cfg(32);
    auto s = frame(c, 6);
    auto delayed = apply_timing_offset(s, 2300);
    const auto tr = cp_timing_metric(delayed, c, 100);
    for (double v : tr.metric) CHECK(v == 0.0);
    CHECK_THROWS_AS(cp_timing_metric(s, c, static_cast<std::int64_t>(s.size())), std::invalid_argument);
}

TEST_CASE("estimator ties resolve to the smallest lag") {
    std::vector<double> m(12, 0.1);
    m[3] = 0.9;
    m[9] = 0.9;
    CHECK(estimate_offset(synthetic_trace(m, 12), 1).delta_hat == 3);
    std::vector<double> u(12, 0.1);
    u[7] = 0.8;
    const auto e = estimate_offset(synthetic_trace(u, 12), 1);
    CHECK(e.delta_hat == 7);
    CHECK(e.confidence == doctest::Approx(0.8));
}

TEST_CASE("averaging folds the trace over symbol periods") {
    // Period 4, two periods: lag 1 wins on average although lag 6 is the single largest value.
    std::vector<double> m{0.0, 0.6, 0.0, 0.0, 0.0, 0.6, 0.9, 0.0};
    const auto e = estimate_offset(synthetic_trace(m, 4), 2);
    CHECK(e.delta_hat == 1);
    CHECK(e.confidence == doctest::Approx(0.6));
    CHECK(e.trace.metric.size() == 4u);
    CHECK(estimate_offset(synthetic_trace(m, 4), 1).delta_hat == 1);
}

TEST_CASE("noiseless delays are recovered exactly for every guard") {
    for (int den : {4, 8, 16, 32}) {
        const auto c = cfg(den);
        const auto s = frame(c, 10 + den);
        for (std::int64_t delta : {0, 1, 5, 15, 300, c.symbol_samples() - 1}) {
            const auto rx = apply_timing_offset(s, delta);
            const auto e = estimate_offset(cp_timing_metric(rx, c, 2 * c.symbol_samples()), 2);
            CHECK(e.delta_hat == delta);
            CHECK(correct_timing(rx, e).samples == std::vector<cplx>(rx.samples.begin() + delta, rx.samples.end()));
        }
    }
}

TEST_CASE("signed_delta maps into (-P/2, P/2]") {
    TimingEstimate e;
    e.trace.period = 2560;
    e.delta_hat = 1280;
    CHECK(e.signed_delta() == 1280);
    e.delta_hat = 1281;
    CHECK(e.signed_delta() == -1279);
    e.delta_hat = 2559;
    CHECK(e.signed_delta() == -1);
    e.delta_hat = 0;
    CHECK(e.signed_delta() == 0);
}

TEST_CASE("phase rotation follows 2 pi k' delta / N") {
    const auto c = cfg(4);
    CHECK(phase_rotation(c, 0, 500) == 0.0);
    CHECK(phase_rotation(c, 1, 1) == doctest::Approx(2 * std::numbers::pi / 2048));
    CHECK(phase_rotation(c, -3, 852) == doctest::Approx(-2 * std::numbers::pi * 3 * 852 / 2048));
}

TEST_CASE("trace CSV layout") {
    std::ostringstream os;
    write_trace_csv(os, synthetic_trace({0.25, 0.5}, 2));
    CHECK(os.str() == "lag,metric\n0,0.25\n1,0.5\n");
}

TEST_CASE("a trace half a period longer moves the fold seam to +-P/2") {
    // Period 4, lags 0..9: the fold uses lags 2..9, so lag 1 is read from lags 5 and 9.
    std::vector<double> m{0.9, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.5};
    const auto e = estimate_offset(synthetic_trace(m, 4), 2);
    CHECK(e.delta_hat == 1);
    CHECK(e.confidence == doctest::Approx(0.5));
    const auto c = cfg(4);
    CHECK(search_span(c, 10, 68 * 2560) == 10 * 2560 + 1280);
    CHECK(search_span(c, 10, 11 * 2560) == 10 * 2560);
}

TEST_CASE("small advances and delays are recovered under noise") {
    const auto c = cfg(4);
    const auto s = frame(c, 31);
    for (std::int64_t delta : {0, 1, 2}) {
        for (bool advance : {false, true}) {
            const auto rx = add_awgn(advance ? apply_timing_advance(s, delta) : apply_timing_offset(s, delta), 12.0, 3);
            const auto e = estimate_offset(cp_timing_metric(rx, c, search_span(c, 10, rx.size())), 10);
            CHECK(e.signed_delta() == (advance ? -delta : delta));
        }
    }
}

TEST_CASE("averaging more symbols keeps the noiseless peak and does not raise the error rate") {
    const auto c = cfg(8);
    const auto s = frame(c, 41);
    double previous_peak = 0.0;
    for (int n : {1, 4, 10}) {
        const auto rx = apply_timing_offset(s, 37);
        const auto e = estimate_offset(cp_timing_metric(rx, c, search_span(c, n, rx.size())), n);
        CHECK(e.delta_hat == 37);
        CHECK(e.confidence >= previous_peak - 1e-12);
        previous_peak = e.confidence;
    }
    // Low SNR so single-symbol estimates miss often.
    int misses_prev = 1 << 30;
    for (int n : {1, 4, 10}) {
        int misses = 0;
        for (int t = 0; t < 60; ++t) {
            const auto rx = add_awgn(apply_timing_offset(s, 37), -3.0, 500 + t);
            misses += estimate_offset(cp_timing_metric(rx, c, search_span(c, n, rx.size())), n).delta_hat != 37;
        }
        CHECK(misses <= misses_prev);
        misses_prev = misses;
    }
}

TEST_CASE("pure noise keeps the metric below 0.5") {
    const auto c = cfg(4);
    SampleStream quiet;
    quiet.samples.assign(3 * c.symbol_samples(), cplx{1.0, 0.0});
    int below = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        auto noise = add_awgn(quiet, -200.0, 700 + t);  // noise dominates the constant entirely
        const auto tr = cp_timing_metric(noise, c, c.symbol_samples());
        below += tr.peak_value < 0.5;
    }
    CHECK(below >= 0.99 * trials);
}

TEST_CASE("phase rotation of one sample on carrier 100") {
    CHECK(phase_rotation(cfg(4), 1, 100) == doctest::Approx(0.3068).epsilon(1e-4));
}
