#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>

namespace ofdmsync {

class KeyValueMap;

/// Allowed guard-interval ratio Δ/T_U. Stored as the denominator of 1/den.
class GuardFraction {
public:
    /// Accepts only 1/4, 1/8, 1/16 and 1/32 (any equivalent num/den, e.g. 2/8).
    static GuardFraction from_ratio(long numerator, long denominator);
    /// Parses "1/4", "1/8", "1/16", "1/32" (surrounding spaces allowed).
    static GuardFraction parse(std::string_view text);

    int denominator() const noexcept { return den_; }
    double value() const noexcept { return 1.0 / den_; }
    std::string to_string() const;

    friend bool operator==(GuardFraction, GuardFraction) = default;

private:
    explicit GuardFraction(int den) : den_(den) {}
    int den_;
};

/// DVB-T numerology. Immutable after construction; copy freely.
struct DvbtConfig {
    double elementary_period_s = 0.0;  ///< T
    int fft_size = 0;                  ///< N
    int active_carriers = 0;           ///< K
    int k_min = 0;
    int k_max = 0;
    double useful_duration_s = 0.0;    ///< T_U = N T
    double carrier_spacing_hz = 0.0;   ///< exact 1/T_U
    GuardFraction guard_fraction = GuardFraction::from_ratio(1, 4);
    int guard_samples = 0;             ///< N_g
    double symbol_duration_s = 0.0;    ///< T_s = Δ + T_U
    int symbols_per_frame = 0;
    int frames_per_superframe = 0;
    int constellation_order = 0;

    double guard_duration_s() const noexcept { return useful_duration_s * guard_fraction.value(); }
    int symbol_samples() const noexcept { return fft_size + guard_samples; }
    double frame_duration_s() const noexcept { return symbols_per_frame * symbol_duration_s; }
    /// (K_max + K_min)/2, the carrier that lands on DC.
    int center_carrier() const noexcept { return (k_max + k_min) / 2; }
    int bits_per_carrier() const noexcept;
    std::int64_t bits_per_symbol() const noexcept { return std::int64_t{active_carriers} * bits_per_carrier(); }
    std::int64_t bits_per_frame() const noexcept { return bits_per_symbol() * symbols_per_frame; }
    /// Occupied bandwidth (K-1)/T_U + one carrier spacing.
    double occupied_bandwidth_hz() const noexcept { return active_carriers * carrier_spacing_hz; }

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;

    friend bool operator==(const DvbtConfig&, const DvbtConfig&) = default;
};

DvbtConfig make_2k_config(GuardFraction guard);
/// 8K numerology (N = 8192, K = 6817). Provided for configuration files only.
DvbtConfig make_8k_config(GuardFraction guard);

/// Maps carrier number k in [k_min, k_max] to its DFT bin: k' = k - center, negative k' wraps to N + k'.
int carrier_to_bin(const DvbtConfig& config, int k);
/// Inverse of carrier_to_bin. Throws for null bins.
int bin_to_carrier(const DvbtConfig& config, int bin);
/// Relative index k' = k - (k_max + k_min)/2.
int carrier_relative_index(const DvbtConfig& config, int k);

/// Flat "key = value" serialization; keys are the field names, SI base units.
std::string config_to_text(const DvbtConfig& config);
/// Builds a config from the DvbtConfig keys present in `keys`, starting from the 2K (or 8K when
/// fft_size = 8192) template for the given guard_fraction, then validates. Other keys are ignored.
DvbtConfig config_from_keys(const KeyValueMap& keys);
/// Names of all DvbtConfig keys.
const std::set<std::string>& config_key_names();

}  // namespace ofdmsync
