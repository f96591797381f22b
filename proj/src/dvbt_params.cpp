#include "ofdmsync/dvbt_params.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ofdmsync/keyvalue.hpp"

namespace ofdmsync {
namespace {

constexpr double kElementaryPeriod = 7.0 / 64.0 * 1e-6;  // 7/64 us

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

DvbtConfig make_config(int fft_size, int active_carriers, GuardFraction guard) {
    DvbtConfig c;
    c.elementary_period_s = kElementaryPeriod;
    c.fft_size = fft_size;
    c.active_carriers = active_carriers;
    c.k_min = 0;
    c.k_max = active_carriers - 1;
    c.useful_duration_s = fft_size * kElementaryPeriod;
    c.carrier_spacing_hz = 1.0 / c.useful_duration_s;
    c.guard_fraction = guard;
    c.guard_samples = fft_size / guard.denominator();
    c.symbol_duration_s = c.useful_duration_s + c.useful_duration_s / guard.denominator();
    c.symbols_per_frame = 68;
    c.frames_per_superframe = 4;
    c.constellation_order = 4;
    c.validate();
    return c;
}

}  // namespace

GuardFraction GuardFraction::from_ratio(long numerator, long denominator) {
    if (numerator <= 0 || denominator <= 0) {
        throw std::invalid_argument("guard fraction must be positive");
    }
    const long g = std::gcd(numerator, denominator);
    numerator /= g;
    denominator /= g;
    if (numerator != 1 || (denominator != 4 && denominator != 8 && denominator != 16 && denominator != 32)) {
        throw std::invalid_argument("guard fraction " + std::to_string(numerator) + "/" +
                                    std::to_string(denominator) +
                                    " not in the allowed set {1/4, 1/8, 1/16, 1/32}");
    }
    return GuardFraction(static_cast<int>(denominator));
}

GuardFraction GuardFraction::parse(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        throw std::invalid_argument("guard fraction must be written as 1/D, got '" + std::string(text) + "'");
    }
    try {
        std::size_t used = 0;
        const std::string num(text.substr(0, slash));
        const std::string den(text.substr(slash + 1));
        const long n = std::stol(num, &used);
        if (used != num.size()) throw std::invalid_argument("");
        const long d = std::stol(den, &used);
        if (used != den.size()) throw std::invalid_argument("");
        return from_ratio(n, d);
    } catch (const std::logic_error& e) {
        if (std::string_view(e.what()).find("allowed set") != std::string_view::npos) {
            throw;
        }
        throw std::invalid_argument("malformed guard fraction '" + std::string(text) + "'");
    }
}

std::string GuardFraction::to_string() const { return "1/" + std::to_string(den_); }

int DvbtConfig::bits_per_carrier() const noexcept {
    int bits = 0;
    for (int m = constellation_order; m > 1; m >>= 1) ++bits;
    return bits;
}

void DvbtConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("invalid DvbtConfig: " + what); };
    if (!(elementary_period_s > 0)) fail("elementary_period_s must be positive");
    if (fft_size <= 0 || (fft_size & (fft_size - 1)) != 0) fail("fft_size must be a positive power of two");
    if (active_carriers <= 0) fail("active_carriers must be positive");
    if (k_max - k_min + 1 != active_carriers) fail("k_max - k_min + 1 != active_carriers");
    if (active_carriers > fft_size) fail("active_carriers exceeds fft_size");
    if (guard_samples * guard_fraction.denominator() != fft_size) fail("guard_samples != guard_fraction * fft_size");
    if (!close_rel(useful_duration_s, fft_size * elementary_period_s, 1e-12)) fail("useful_duration_s != N T");
    if (!close_rel(carrier_spacing_hz * useful_duration_s, 1.0, 1e-12)) fail("carrier_spacing_hz * useful_duration_s != 1");
    if (!close_rel(symbol_duration_s, useful_duration_s * (1.0 + guard_fraction.value()), 1e-12)) {
        fail("symbol_duration_s != useful_duration_s * (1 + guard_fraction)");
    }
    if (symbols_per_frame <= 0) fail("symbols_per_frame must be positive");
    if (frames_per_superframe <= 0) fail("frames_per_superframe must be positive");
    if (constellation_order != 4) fail("only 4-QAM (constellation_order = 4) is supported");
}

DvbtConfig make_2k_config(GuardFraction guard) { return make_config(2048, 1705, guard); }

DvbtConfig make_8k_config(GuardFraction guard) { return make_config(8192, 6817, guard); }

int carrier_relative_index(const DvbtConfig& config, int k) {
    if (k < config.k_min || k > config.k_max) {
        throw std::out_of_range("carrier " + std::to_string(k) + " outside [" + std::to_string(config.k_min) +
                                ", " + std::to_string(config.k_max) + "]");
    }
    return k - config.center_carrier();
}

int carrier_to_bin(const DvbtConfig& config, int k) {
    const int k_rel = carrier_relative_index(config, k);
    return k_rel >= 0 ? k_rel : config.fft_size + k_rel;
}

int bin_to_carrier(const DvbtConfig& config, int bin) {
    if (bin < 0 || bin >= config.fft_size) {
        throw std::out_of_range("bin " + std::to_string(bin) + " outside the transform");
    }
    const int k_rel = bin < config.fft_size / 2 ? bin : bin - config.fft_size;
    const int k = k_rel + config.center_carrier();
    if (k < config.k_min || k > config.k_max) {
        throw std::out_of_range("bin " + std::to_string(bin) + " is a null carrier");
    }
    return k;
}

std::string config_to_text(const DvbtConfig& c) {
    KeyValueMap kv;
    kv.set("elementary_period_s", format_double(c.elementary_period_s));
    kv.set("fft_size", std::to_string(c.fft_size));
    kv.set("active_carriers", std::to_string(c.active_carriers));
    kv.set("k_min", std::to_string(c.k_min));
    kv.set("k_max", std::to_string(c.k_max));
    kv.set("useful_duration_s", format_double(c.useful_duration_s));
    kv.set("carrier_spacing_hz", format_double(c.carrier_spacing_hz));
    kv.set("guard_fraction", c.guard_fraction.to_string());
    kv.set("guard_samples", std::to_string(c.guard_samples));
    kv.set("symbol_duration_s", format_double(c.symbol_duration_s));
    kv.set("symbols_per_frame", std::to_string(c.symbols_per_frame));
    kv.set("frames_per_superframe", std::to_string(c.frames_per_superframe));
    kv.set("constellation_order", std::to_string(c.constellation_order));
    return kv.to_text();
}

const std::set<std::string>& config_key_names() {
    static const std::set<std::string> names{
        "elementary_period_s", "fft_size",          "active_carriers",   "k_min",
        "k_max",               "useful_duration_s", "carrier_spacing_hz", "guard_fraction",
        "guard_samples",       "symbol_duration_s", "symbols_per_frame", "frames_per_superframe",
        "constellation_order"};
    return names;
}

DvbtConfig config_from_keys(const KeyValueMap& keys) {
    GuardFraction guard = GuardFraction::from_ratio(1, 4);
    if (const auto g = keys.get("guard_fraction")) {
        try {
            guard = GuardFraction::parse(*g);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("guard_fraction", std::string("key 'guard_fraction': ") + e.what());
        }
    }
    const auto fft = keys.get_int("fft_size");
    DvbtConfig c = (fft && *fft == 8192) ? make_8k_config(guard) : make_2k_config(guard);

    auto set_int = [&](const char* key, int& field) {
        if (const auto v = keys.get_int(key)) field = static_cast<int>(*v);
    };
    auto set_real = [&](const char* key, double& field) {
        if (const auto v = keys.get_double(key)) field = *v;
    };
    set_real("elementary_period_s", c.elementary_period_s);
    set_int("fft_size", c.fft_size);
    set_int("active_carriers", c.active_carriers);
    set_int("k_min", c.k_min);
    set_int("k_max", c.k_max);
    set_real("useful_duration_s", c.useful_duration_s);
    set_real("carrier_spacing_hz", c.carrier_spacing_hz);
    set_int("guard_samples", c.guard_samples);
    set_real("symbol_duration_s", c.symbol_duration_s);
    set_int("symbols_per_frame", c.symbols_per_frame);
    set_int("frames_per_superframe", c.frames_per_superframe);
    set_int("constellation_order", c.constellation_order);
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("", e.what());
    }
    return c;
}

}  // namespace ofdmsync
