#include "ofdmsync/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "ofdmsync/channel.hpp"
#include "ofdmsync/keyvalue.hpp"
#include "ofdmsync/rxchain.hpp"
#include "ofdmsync/timing_sync.hpp"
#include "ofdmsync/txchain.hpp"

namespace ofdmsync {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Bits random_bits(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Bits bits(count);
    std::size_t i = 0;
    while (i < count) {
        std::uint64_t word = rng();
        for (int b = 0; b < 64 && i < count; ++b, ++i) {
            bits[i] = static_cast<std::uint8_t>((word >> b) & 1u);
        }
    }
    return bits;
}

std::optional<TimingEstimate> oracle_estimate(const DvbtConfig& config, std::int64_t true_shift) {
    const std::int64_t period = config.symbol_samples();
    TimingEstimate est;
    est.delta_hat = ((true_shift % period) + period) % period;
    est.confidence = 1.0;
    est.trace.period = period;
    return est;
}

}  // namespace

std::string to_string(EstimatorMode mode) {
    switch (mode) {
        case EstimatorMode::Off: return "off";
        case EstimatorMode::On: return "on";
        case EstimatorMode::Oracle: return "oracle";
    }
    return "?";
}

std::string to_string(OffsetDirection direction) {
    return direction == OffsetDirection::Delay ? "delay" : "advance";
}

std::string to_string(SnrAxis axis) { return axis == SnrAxis::Sample ? "sample" : "ebn0"; }

EstimatorMode parse_estimator_mode(const std::string& text) {
    if (text == "off") return EstimatorMode::Off;
    if (text == "on") return EstimatorMode::On;
    if (text == "oracle") return EstimatorMode::Oracle;
    throw std::invalid_argument("estimator mode must be off, on or oracle, got '" + text + "'");
}

OffsetDirection parse_offset_direction(const std::string& text) {
    if (text == "delay") return OffsetDirection::Delay;
    if (text == "advance") return OffsetDirection::Advance;
    throw std::invalid_argument("offset direction must be delay or advance, got '" + text + "'");
}

SnrAxis parse_snr_axis(const std::string& text) {
    if (text == "sample") return SnrAxis::Sample;
    if (text == "ebn0") return SnrAxis::EbN0;
    throw std::invalid_argument("snr axis must be sample or ebn0, got '" + text + "'");
}

void ExperimentSpec::validate() const {
    config.validate();
    if (snr_grid_db.empty()) throw std::invalid_argument("SNR grid is empty");
    if (offsets.empty()) throw std::invalid_argument("offset grid is empty");
    if (modes.empty()) throw std::invalid_argument("no estimator mode selected");
    for (double s : snr_grid_db) {
        if (std::isnan(s) || s == -INFINITY) throw std::invalid_argument("SNR grid values must be finite or +inf");
    }
    const std::int64_t period = config.symbol_samples();
    for (auto o : offsets) {
        if (o < 0 || 2 * o >= period) {
            throw std::invalid_argument("offset " + std::to_string(o) + " outside [0, " + std::to_string(period / 2) +
                                        ")");
        }
    }
    if (min_bits < 10'000) throw std::invalid_argument("min_bits must be >= 10^4");
    if (max_bits < min_bits) throw std::invalid_argument("max_bits must be >= min_bits");
    if (target_errors < 100) throw std::invalid_argument("target_errors must be >= 100");
    if (sync_symbols < 1 || sync_symbols >= config.symbols_per_frame) {
        throw std::invalid_argument("sync_symbols must lie in [1, symbols_per_frame)");
    }
    if (!(target_ber > 0 && target_ber < 1)) throw std::invalid_argument("target_ber must lie in (0, 1)");
}

double snr_to_ebn0_db(const DvbtConfig& config, double snr_db) {
    return snr_db - 10.0 * std::log10(static_cast<double>(config.bits_per_carrier()) * config.active_carriers /
                                      config.fft_size);
}

double ebn0_to_snr_db(const DvbtConfig& config, double ebn0_db) {
    return ebn0_db + 10.0 * std::log10(static_cast<double>(config.bits_per_carrier()) * config.active_carriers /
                                       config.fft_size);
}

std::uint64_t point_seed(std::uint64_t base_seed, double snr_db, std::int64_t offset) {
    std::uint64_t h = splitmix64(base_seed);
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(snr_db));
    h = splitmix64(h ^ static_cast<std::uint64_t>(offset));
    return h;
}

BerRecord run_point(const ExperimentSpec& spec, EstimatorMode mode, double snr_db, std::int64_t offset) {
    return run_point(spec, mode, snr_db, offset, point_seed(spec.seed, snr_db, offset));
}

BerRecord run_point(const ExperimentSpec& spec, EstimatorMode mode, double snr_db, std::int64_t offset,
                    std::uint64_t seed) {
    spec.validate();
    const auto& config = spec.config;
    const auto frame_bits = static_cast<std::size_t>(config.bits_per_frame());
    // signed window shift the receiver must undo
    const std::int64_t true_shift = spec.direction == OffsetDirection::Delay ? offset : -offset;

    BerRecord rec;
    rec.snr_db = snr_db;
    rec.ebn0_db = snr_to_ebn0_db(config, snr_db);
    rec.offset = offset;
    rec.mode = mode;
    rec.direction = spec.direction;
    rec.derotate = spec.derotate;
    rec.seed = seed;

    for (std::uint64_t frame = 0;; ++frame) {
        const std::uint64_t frame_seed = splitmix64(seed + frame);
        const Bits sent = random_bits(frame_bits, frame_seed);
        const SampleStream tx = build_frame(config, sent, static_cast<int>(frame));

        SampleStream rx = offset == 0 ? tx
                          : spec.direction == OffsetDirection::Delay ? apply_timing_offset(tx, offset)
                                                                     : apply_timing_advance(tx, offset);
        rx = add_awgn(rx, snr_db, splitmix64(frame_seed ^ 0x6e6f697365ULL));

        const auto estimate = estimate_for_mode(config, rx, mode, true_shift, spec.sync_symbols);
        if (mode == EstimatorMode::On && estimate->signed_delta() != true_shift) {
            ++rec.est_failures;
        }

        const Bits got = receive_frame(config, rx, estimate, spec.derotate);
        std::int64_t errs = 0;
        for (std::size_t i = 0; i < frame_bits; ++i) {
            errs += (got[i] != sent[i]);
        }
        rec.errors += errs;
        rec.bits += static_cast<std::int64_t>(frame_bits);
        ++rec.frames;

        if (rec.bits >= spec.min_bits && (rec.errors >= spec.target_errors || rec.bits >= spec.max_bits)) {
            break;
        }
    }
    rec.ber = static_cast<double>(rec.errors) / static_cast<double>(rec.bits);
    rec.quoted = rec.errors >= spec.target_errors || rec.bits >= spec.max_bits;
    return rec;
}

std::optional<TimingEstimate> estimate_for_mode(const DvbtConfig& config, const SampleStream& received,
                                                EstimatorMode mode, std::int64_t true_shift, int sync_symbols) {
    switch (mode) {
        case EstimatorMode::Off:
            return std::nullopt;
        case EstimatorMode::On:
            return estimate_offset(
                cp_timing_metric(received, config, search_span(config, sync_symbols, received.size())), sync_symbols);
        case EstimatorMode::Oracle:
            return oracle_estimate(config, true_shift);
    }
    return std::nullopt;
}

double theory_ber_qpsk(double ebn0_db) {
    if (std::isinf(ebn0_db) && ebn0_db > 0) {
        return 0.0;
    }
    return 0.5 * std::erfc(std::sqrt(std::pow(10.0, ebn0_db / 10.0)));
}

std::vector<RequiredSnr> required_snr(std::span<const BerRecord> records, double target_ber) {
    if (!(target_ber > 0)) {
        throw std::invalid_argument("target BER must be positive");
    }
    std::vector<std::pair<EstimatorMode, std::int64_t>> order;
    std::map<std::pair<EstimatorMode, std::int64_t>, std::vector<BerRecord>> groups;
    for (const auto& r : records) {
        const auto key = std::make_pair(r.mode, r.offset);
        if (groups.find(key) == groups.end()) {
            order.push_back(key);
        }
        groups[key].push_back(r);
    }

    std::vector<RequiredSnr> out;
    for (const auto& key : order) {
        auto pts = groups[key];
        std::erase_if(pts, [](const BerRecord& r) { return r.errors <= 0 || !std::isfinite(r.snr_db); });
        std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.snr_db < b.snr_db; });

        RequiredSnr row;
        row.mode = key.first;
        row.offset = key.second;
        row.target_ber = target_ber;
        row.snr_db = std::nan("");
        row.ebn0_db = std::nan("");
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const auto& lo = pts[i];
            const auto& hi = pts[i + 1];
            if (lo.ber >= target_ber && hi.ber <= target_ber && lo.ber > hi.ber) {
                const double t = (std::log10(target_ber) - std::log10(lo.ber)) /
                                 (std::log10(hi.ber) - std::log10(lo.ber));
                row.snr_db = lo.snr_db + t * (hi.snr_db - lo.snr_db);
                row.ebn0_db = lo.ebn0_db + t * (hi.ebn0_db - lo.ebn0_db);
                row.bracketed = true;
                break;
            }
        }
        out.push_back(row);
    }
    return out;
}

void write_ber_csv_header(std::ostream& out) {
    out << "snr_db,offset,mode,bits,errors,ber,est_failures,seed,ebn0_db,direction,derotate,quoted\n";
}

void write_ber_csv_row(std::ostream& out, const BerRecord& r) {
    out << format_double(r.snr_db) << ',' << r.offset << ',' << to_string(r.mode) << ',' << r.bits << ',' << r.errors
        << ',' << format_double(r.ber) << ',' << r.est_failures << ',' << r.seed << ',' << format_double(r.ebn0_db)
        << ',' << to_string(r.direction) << ',' << (r.derotate ? 1 : 0) << ',' << (r.quoted ? 1 : 0) << '\n';
}

void write_summary_csv(std::ostream& out, std::span<const RequiredSnr> rows, const ExperimentSpec& spec) {
    out << "timing_offset,ber,snr_db,ebn0_db,mode,direction,derotate,bracketed\n";
    for (const auto& r : rows) {
        out << r.offset << ',' << format_double(r.target_ber) << ','
            << (r.bracketed ? format_double(r.snr_db) : std::string("nan")) << ','
            << (r.bracketed ? format_double(r.ebn0_db) : std::string("nan")) << ',' << to_string(r.mode) << ','
            << to_string(spec.direction) << ',' << (spec.derotate ? 1 : 0) << ',' << (r.bracketed ? 1 : 0) << '\n';
    }
}

std::vector<BerRecord> sweep(const ExperimentSpec& spec, std::ostream* csv,
                             const std::function<void(const BerRecord&)>& progress) {
    spec.validate();
    std::vector<double> grid;
    for (double s : spec.snr_grid_db) {
        grid.push_back(spec.snr_axis == SnrAxis::EbN0 ? ebn0_to_snr_db(spec.config, s) : s);
    }
    if (csv) {
        write_ber_csv_header(*csv);
        csv->flush();
    }
    std::vector<BerRecord> records;
    try {
        for (auto mode : spec.modes) {
            for (auto offset : spec.offsets) {
                for (double snr : grid) {
                    records.push_back(run_point(spec, mode, snr, offset));
                    if (csv) {
                        write_ber_csv_row(*csv, records.back());
                        csv->flush();
                    }
                    if (progress) {
                        progress(records.back());
                    }
                }
            }
        }
    } catch (...) {
        if (csv) {
            csv->flush();
        }
        throw;
    }
    return records;
}

const std::set<std::string>& experiment_key_names() {
    static const std::set<std::string> names = [] {
        std::set<std::string> s = config_key_names();
        s.insert({"snr_grid_db", "snr_axis", "offsets", "offset_direction", "estimator_mode", "derotate", "min_bits",
                  "max_bits", "target_errors", "seed", "sync_symbols", "target_ber"});
        return s;
    }();
    return names;
}

ExperimentSpec experiment_from_keys(const KeyValueMap& keys) {
    keys.require_known(experiment_key_names());
    ExperimentSpec spec;
    spec.config = config_from_keys(keys);
    auto wrap = [](const char* key, auto&& fn) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(key, std::string("key '") + key + "': " + e.what());
        }
    };
    if (auto v = keys.get_double_list("snr_grid_db")) spec.snr_grid_db = *v;
    if (auto v = keys.get("snr_axis")) wrap("snr_axis", [&] { spec.snr_axis = parse_snr_axis(*v); });
    if (auto v = keys.get_int_list("offsets")) spec.offsets.assign(v->begin(), v->end());
    if (auto v = keys.get("offset_direction")) {
        wrap("offset_direction", [&] { spec.direction = parse_offset_direction(*v); });
    }
    if (auto v = keys.get_string_list("estimator_mode")) {
        wrap("estimator_mode", [&] {
            spec.modes.clear();
            for (const auto& m : *v) spec.modes.push_back(parse_estimator_mode(m));
        });
    }
    if (auto v = keys.get_bool("derotate")) spec.derotate = *v;
    if (auto v = keys.get_int("min_bits")) spec.min_bits = *v;
    if (auto v = keys.get_int("max_bits")) spec.max_bits = *v;
    if (auto v = keys.get_int("target_errors")) spec.target_errors = *v;
    if (auto v = keys.get_int("seed")) spec.seed = static_cast<std::uint64_t>(*v);
    if (auto v = keys.get_int("sync_symbols")) spec.sync_symbols = static_cast<int>(*v);
    if (auto v = keys.get_double("target_ber")) spec.target_ber = *v;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("", e.what());
    }
    return spec;
}

std::string experiment_to_text(const ExperimentSpec& spec) {
    auto kv = KeyValueMap::parse(config_to_text(spec.config));
    auto join = [](const auto& items, auto fmt) {
        std::string s;
        for (const auto& it : items) {
            if (!s.empty()) s += ", ";
            s += fmt(it);
        }
        return s;
    };
    kv.set("snr_grid_db", join(spec.snr_grid_db, [](double d) { return format_double(d); }));
    kv.set("snr_axis", to_string(spec.snr_axis));
    kv.set("offsets", join(spec.offsets, [](std::int64_t o) { return std::to_string(o); }));
    kv.set("offset_direction", to_string(spec.direction));
    kv.set("estimator_mode", join(spec.modes, [](EstimatorMode m) { return to_string(m); }));
    kv.set("derotate", spec.derotate ? "true" : "false");
    kv.set("min_bits", std::to_string(spec.min_bits));
    kv.set("max_bits", std::to_string(spec.max_bits));
    kv.set("target_errors", std::to_string(spec.target_errors));
    kv.set("seed", std::to_string(spec.seed));
    kv.set("sync_symbols", std::to_string(spec.sync_symbols));
    kv.set("target_ber", format_double(spec.target_ber));
    return kv.to_text();
}

}  // namespace ofdmsync
