#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ofdmsync/dvbt_params.hpp"
#include "ofdmsync/timing_sync.hpp"
#include "ofdmsync/txchain.hpp"

namespace ofdmsync {

class KeyValueMap;

/// off: slice at the nominal origin, no correction.
/// on: CP-correlation estimate drives the correction.
/// oracle: the true channel offset drives the correction.
enum class EstimatorMode { Off, On, Oracle };

/// delay: apply_timing_offset (nominal window lands inside the CP).
/// advance: apply_timing_advance (nominal window reaches into the next symbol).
enum class OffsetDirection { Delay, Advance };

/// Grid values are per-sample SNR or E_b/N_0.
enum class SnrAxis { Sample, EbN0 };

std::string to_string(EstimatorMode mode);
std::string to_string(OffsetDirection direction);
std::string to_string(SnrAxis axis);
EstimatorMode parse_estimator_mode(const std::string& text);
OffsetDirection parse_offset_direction(const std::string& text);
SnrAxis parse_snr_axis(const std::string& text);

struct ExperimentSpec {
    DvbtConfig config = make_2k_config(GuardFraction::from_ratio(1, 4));
    std::vector<double> snr_grid_db;
    SnrAxis snr_axis = SnrAxis::Sample;
    std::vector<std::int64_t> offsets;
    OffsetDirection direction = OffsetDirection::Delay;
    std::vector<EstimatorMode> modes{EstimatorMode::On};
    /// For on/oracle: correct by per-carrier phase derotation instead of re-slicing.
    bool derotate = false;
    std::int64_t min_bits = 10'000;
    std::int64_t max_bits = 10'000'000;
    std::int64_t target_errors = 100;
    std::uint64_t seed = 1;
    /// Symbols whose metric is averaged by the CP estimator.
    int sync_symbols = 10;
    /// BER level for the required-SNR summary.
    double target_ber = 1e-5;

    /// Throws std::invalid_argument.
    void validate() const;
};

struct BerRecord {
    double snr_db = 0.0;   ///< per-sample SNR
    double ebn0_db = 0.0;
    std::int64_t offset = 0;
    EstimatorMode mode = EstimatorMode::Off;
    OffsetDirection direction = OffsetDirection::Delay;
    bool derotate = false;
    std::int64_t bits = 0;
    std::int64_t errors = 0;
    double ber = 0.0;
    std::int64_t est_failures = 0;  ///< frames where the estimate missed the true offset
    std::int64_t frames = 0;
    std::uint64_t seed = 0;         ///< point seed; run_point with this seed replays the row
    bool quoted = false;            ///< errors >= target_errors or the bit cap was reached
};

struct RequiredSnr {
    EstimatorMode mode = EstimatorMode::Off;
    std::int64_t offset = 0;
    double target_ber = 0.0;
    double snr_db = 0.0;   ///< NaN when unbracketed
    double ebn0_db = 0.0;  ///< NaN when unbracketed
    bool bracketed = false;
};

/// E_b/N_0 = SNR - 10 log10(bits_per_carrier * K / N).
double snr_to_ebn0_db(const DvbtConfig& config, double snr_db);
double ebn0_to_snr_db(const DvbtConfig& config, double ebn0_db);

/// Seed for one grid point; independent of the estimator mode so modes share realizations.
std::uint64_t point_seed(std::uint64_t base_seed, double snr_db, std::int64_t offset);

/// Monte-Carlo BER at one point: random frames -> channel -> receiver, until target_errors
/// (and min_bits) or max_bits. snr_db is per-sample SNR.
BerRecord run_point(const ExperimentSpec& spec, EstimatorMode mode, double snr_db, std::int64_t offset);
BerRecord run_point(const ExperimentSpec& spec, EstimatorMode mode, double snr_db, std::int64_t offset,
                    std::uint64_t seed);

/// Timing estimate a receiver in `mode` would act on. true_shift is the signed window shift the
/// channel introduced (+delta for delay, -delta for advance). Off returns no estimate.
std::optional<TimingEstimate> estimate_for_mode(const DvbtConfig& config, const SampleStream& received,
                                                EstimatorMode mode, std::int64_t true_shift, int sync_symbols);

/// Gray 4-QAM bit error probability in AWGN, 0.5 erfc(sqrt(E_b/N_0)).
double theory_ber_qpsk(double ebn0_db);

/// Per (mode, offset) group: log10(BER)-linear interpolation between the first adjacent pair of
/// points (by SNR, zero-error points skipped) that brackets target_ber. No extrapolation.
std::vector<RequiredSnr> required_snr(std::span<const BerRecord> records, double target_ber);

/// Runs every (mode, offset, snr) point. Each finished row is written and flushed to `csv`
/// (header first) so an interrupted run leaves only complete rows.
std::vector<BerRecord> sweep(const ExperimentSpec& spec, std::ostream* csv = nullptr,
                             const std::function<void(const BerRecord&)>& progress = {});

void write_ber_csv_header(std::ostream& out);
void write_ber_csv_row(std::ostream& out, const BerRecord& record);
void write_summary_csv(std::ostream& out, std::span<const RequiredSnr> rows, const ExperimentSpec& spec);

/// Experiment file keys: DvbtConfig keys plus snr_grid_db, snr_axis, offsets, offset_direction,
/// estimator_mode (list), derotate, min_bits, max_bits, target_errors, seed, sync_symbols, target_ber.
ExperimentSpec experiment_from_keys(const KeyValueMap& keys);
std::string experiment_to_text(const ExperimentSpec& spec);
const std::set<std::string>& experiment_key_names();

}  // namespace ofdmsync
