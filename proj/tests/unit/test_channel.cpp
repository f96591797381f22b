#include <doctest.h>

#include <cmath>

#include "ofdmsync/channel.hpp"
#include "support/oracles.hpp"

using namespace ofdmsync;

namespace {

SampleStream ramp(std::size_t n) {
    SampleStream s;
    s.sample_period_s = 1e-7;
    for (std::size_t i = 0; i < n; ++i) s.samples.emplace_back(double(i + 1), -double(i));
    return s;
}

}  // namespace

TEST_CASE("delay prepends zeros and keeps the origin") {
    const auto s = ramp(50);
    const auto d = apply_timing_offset(s, 7);
    REQUIRE(d.size() == 57u);
    for (int i = 0; i < 7; ++i) CHECK(d.samples[i] == cplx{});
    for (int i = 0; i < 50; ++i) CHECK(d.samples[i + 7] == s.samples[i]);
    CHECK(d.origin_index == s.origin_index);
    CHECK(apply_timing_offset(s, 0).samples == s.samples);
}

TEST_CASE("delays compose additively") {
    const auto s = ramp(40);
    CHECK(apply_timing_offset(apply_timing_offset(s, 3), 4).samples == apply_timing_offset(s, 7).samples);
}

TEST_CASE("advance drops leading samples and keeps the length") {
    const auto s = ramp(30);
    const auto a = apply_timing_advance(s, 5);
    REQUIRE(a.size() == 30u);
    for (int i = 0; i < 25; ++i) CHECK(a.samples[i] == s.samples[i + 5]);
    for (int i = 25; i < 30; ++i) CHECK(a.samples[i] == cplx{});
}

TEST_CASE("offsets outside [0, length) are rejected") {
    const auto s = ramp(10);
    CHECK_THROWS_AS(apply_timing_offset(s, -1), std::out_of_range);
    CHECK_THROWS_AS(apply_timing_offset(s, 10), std::out_of_range);
    CHECK_THROWS_AS(apply_timing_advance(s, 10), std::out_of_range);
}

TEST_CASE("AWGN has the requested variance, balanced parts and zero mean") {
    SampleStream s;
    s.samples.assign(1'000'000, cplx{0.5, -0.5});  // power 0.5
    const double snr_db = 6.0;
    const auto r = add_awgn(s, snr_db, 42);
    const double sigma2 = 0.5 / std::pow(10.0, snr_db / 10.0);
    double sre = 0, sim = 0, vre = 0, vim = 0;
    const double n = double(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const cplx w = r.samples[i] - s.samples[i];
        sre += w.real();
        sim += w.imag();
        vre += w.real() * w.real();
        vim += w.imag() * w.imag();
    }
    CHECK((vre + vim) / n == doctest::Approx(sigma2).epsilon(0.01));
    CHECK(vre / n == doctest::Approx(sigma2 / 2).epsilon(0.02));
    CHECK(vim / n == doctest::Approx(sigma2 / 2).epsilon(0.02));
    const double tol = 4.0 * std::sqrt(sigma2 / 2 / n);
    CHECK(std::abs(sre / n) < tol);
    CHECK(std::abs(sim / n) < tol);
}

TEST_CASE("AWGN is deterministic per seed and infinite SNR is noiseless") {
    const auto s = ramp(1000);
    CHECK(add_awgn(s, 10.0, 1).samples == add_awgn(s, 10.0, 1).samples);
    CHECK(add_awgn(s, 10.0, 1).samples != add_awgn(s, 10.0, 2).samples);
    CHECK(add_awgn(s, kNoiselessSnr, 1).samples == s.samples);
    SampleStream zero;
    zero.samples.assign(10, cplx{});
    CHECK_THROWS_AS(add_awgn(zero, 10.0, 1), std::invalid_argument);
}

TEST_CASE("apply_channel is offset then noise") {
    const auto s = ramp(200);
    ChannelSpec spec{12.0, 9, 77};
    const auto expect = add_awgn(apply_timing_offset(s, 9), 12.0, 77);
    CHECK(apply_channel(s, spec).samples == expect.samples);
}
