#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "ofdmsync/channel.hpp"
#include "ofdmsync/dvbt_params.hpp"
#include "ofdmsync/harness.hpp"
#include "ofdmsync/keyvalue.hpp"
#include "ofdmsync/rxchain.hpp"
#include "ofdmsync/timing_sync.hpp"
#include "ofdmsync/txchain.hpp"

#ifndef OFDMSYNC_VERSION
#define OFDMSYNC_VERSION "dev"
#endif

namespace ofdmsync::cli {
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr const char* kOutEnv = "OFDMSYNC_OUT";

/// Flags shared by every command. Empty strings / unset flags leave config-file values alone.
struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string seed;
    std::string guard;
    std::string snr_db;
    std::string offset;
    std::string mode;
    std::string direction;
    bool derotate = false;
};

void add_common(CLI::App& cmd, CommonFlags& f) {
    cmd.add_option("--config,--spec", f.config_path, "key = value configuration file");
    cmd.add_option("--out", f.out_dir, std::string("output directory (default $") + kOutEnv + " or ./ofdmsync_out)");
    cmd.add_option("--seed", f.seed, "random seed");
    cmd.add_option("--guard", f.guard, "guard fraction")->check(CLI::IsMember({"1/4", "1/8", "1/16", "1/32"}));
    cmd.add_option("--snr-db", f.snr_db, "per-sample SNR in dB (inf = noiseless)");
    cmd.add_option("--offset", f.offset, "timing offset in samples");
    cmd.add_option("--mode", f.mode, "estimator mode")->check(CLI::IsMember({"off", "on", "oracle"}));
    cmd.add_option("--direction", f.direction, "offset direction")->check(CLI::IsMember({"delay", "advance"}));
    cmd.add_flag("--derotate", f.derotate, "correct by per-carrier derotation instead of re-slicing");
}

const std::set<std::string>& run_key_names() {
    static const std::set<std::string> names = [] {
        std::set<std::string> s = config_key_names();
        s.insert({"snr_db", "timing_offset_samples", "rng_seed", "estimator_mode", "offset_direction", "derotate",
                  "sync_symbols", "frames", "passband", "carrier_hz", "oversample"});
        return s;
    }();
    return names;
}

KeyValueMap load_keys(const CommonFlags& f) {
    if (f.config_path.empty()) return KeyValueMap{};
    if (!fs::is_regular_file(f.config_path)) {
        throw ConfigError("config", "cannot open config file '" + f.config_path + "'");
    }
    return KeyValueMap::load(f.config_path);
}

/// Flags override file keys.
void apply_run_flags(KeyValueMap& kv, const CommonFlags& f) {
    if (!f.guard.empty()) kv.set("guard_fraction", f.guard);
    if (!f.seed.empty()) kv.set("rng_seed", f.seed);
    if (!f.snr_db.empty()) kv.set("snr_db", f.snr_db);
    if (!f.offset.empty()) kv.set("timing_offset_samples", f.offset);
    if (!f.mode.empty()) kv.set("estimator_mode", f.mode);
    if (!f.direction.empty()) kv.set("offset_direction", f.direction);
    if (f.derotate) kv.set("derotate", "true");
}

fs::path output_dir(const CommonFlags& f) {
    if (!f.out_dir.empty()) return f.out_dir;
    if (const char* env = std::getenv(kOutEnv); env != nullptr && *env != '\0') return env;
    return "ofdmsync_out";
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    }
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::ofstream open_in(const fs::path& dir, const std::string& name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
}

/// RunManifest: what ran, with which resolved settings, so the directory can be regenerated.
void write_manifest(const fs::path& dir, const std::string& command, const CommonFlags& f, std::uint64_t seed,
                    const std::string& resolved_text) {
    open_in(dir, "resolved.cfg") << resolved_text;
    KeyValueMap m;
    m.set("command", command);
    m.set("config_path", f.config_path.empty() ? "(none)" : f.config_path);
    m.set("output_dir", dir.string());
    m.set("seed", std::to_string(seed));
    m.set("tool_version", OFDMSYNC_VERSION);
    m.set("timestamp", timestamp());
    m.set("resolved_config", "resolved.cfg");
    m.set("replay", "ofdmsync " + command + " --config " + (dir / "resolved.cfg").string() + " --out <dir>");
    open_in(dir, "manifest.txt") << m.to_text();
}

struct RunSettings {
    DvbtConfig config;
    ChannelSpec channel;
    EstimatorMode mode = EstimatorMode::Off;
    OffsetDirection direction = OffsetDirection::Delay;
    bool derotate = false;
    int sync_symbols = 1;
    int frames = 1;
    bool passband = false;
    PassbandOptions passband_options;
};

RunSettings resolve_run(const KeyValueMap& kv) {
    kv.require_known(run_key_names());
    RunSettings s;
    s.config = config_from_keys(kv);
    auto wrap = [](const char* key, auto&& fn) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(key, std::string("key '") + key + "': " + e.what());
        }
    };
    if (auto v = kv.get_double("snr_db")) s.channel.snr_db = *v;
    if (auto v = kv.get_int("timing_offset_samples")) {
        if (*v < 0) throw ConfigError("timing_offset_samples", "key 'timing_offset_samples' must be >= 0");
        s.channel.timing_offset_samples = *v;
    }
    if (auto v = kv.get_int("rng_seed")) s.channel.rng_seed = static_cast<std::uint64_t>(*v);
    if (auto v = kv.get("estimator_mode")) wrap("estimator_mode", [&] { s.mode = parse_estimator_mode(*v); });
    if (auto v = kv.get("offset_direction")) {
        wrap("offset_direction", [&] { s.direction = parse_offset_direction(*v); });
    }
    if (auto v = kv.get_bool("derotate")) s.derotate = *v;
    if (auto v = kv.get_int("sync_symbols")) {
        if (*v < 1 || *v >= s.config.symbols_per_frame) {
            throw ConfigError("sync_symbols", "key 'sync_symbols' must lie in [1, symbols_per_frame)");
        }
        s.sync_symbols = static_cast<int>(*v);
    }
    if (auto v = kv.get_int("frames")) {
        if (*v < 1) throw ConfigError("frames", "key 'frames' must be >= 1");
        s.frames = static_cast<int>(*v);
    }
    if (auto v = kv.get_bool("passband")) s.passband = *v;
    s.passband_options.carrier_hz = kv.get_double("carrier_hz").value_or(4.0 / s.config.elementary_period_s);
    if (auto v = kv.get_int("oversample")) s.passband_options.oversample = static_cast<int>(*v);
    return s;
}

std::string resolved_run_text(const RunSettings& s) {
    auto kv = KeyValueMap::parse(config_to_text(s.config));
    kv.set("snr_db", format_double(s.channel.snr_db));
    kv.set("timing_offset_samples", std::to_string(s.channel.timing_offset_samples));
    kv.set("rng_seed", std::to_string(s.channel.rng_seed));
    kv.set("estimator_mode", to_string(s.mode));
    kv.set("offset_direction", to_string(s.direction));
    kv.set("derotate", s.derotate ? "true" : "false");
    kv.set("sync_symbols", std::to_string(s.sync_symbols));
    kv.set("frames", std::to_string(s.frames));
    kv.set("passband", s.passband ? "true" : "false");
    kv.set("carrier_hz", format_double(s.passband_options.carrier_hz));
    kv.set("oversample", std::to_string(s.passband_options.oversample));
    return kv.to_text();
}

SampleStream through_channel(const RunSettings& s, const SampleStream& tx, std::uint64_t noise_seed) {
    const auto delta = s.channel.timing_offset_samples;
    SampleStream rx = delta == 0 ? tx
                      : s.direction == OffsetDirection::Delay ? apply_timing_offset(tx, delta)
                                                              : apply_timing_advance(tx, delta);
    return add_awgn(rx, s.channel.snr_db, noise_seed);
}

std::int64_t true_shift(const RunSettings& s) {
    return s.direction == OffsetDirection::Delay ? s.channel.timing_offset_samples : -s.channel.timing_offset_samples;
}

Bits read_bits_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("bits-in", "cannot open bits file '" + path + "'");
    Bits bits;
    char c;
    while (in.get(c)) {
        if (c == '0' || c == '1') {
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            throw ConfigError("bits-in", "bits file '" + path + "' may contain only 0, 1 and whitespace");
        }
    }
    return bits;
}

void write_bits(std::ostream& out, const Bits& bits) {
    for (std::size_t i = 0; i < bits.size(); ++i) {
        out << static_cast<char>('0' + bits[i]);
        if ((i + 1) % 64 == 0 || i + 1 == bits.size()) out << '\n';
    }
}

int cmd_txrx(const CommonFlags& f, const std::string& bits_in, std::ostream& out) {
    auto kv = load_keys(f);
    apply_run_flags(kv, f);
    RunSettings s = resolve_run(kv);

    const auto frame_bits = static_cast<std::size_t>(s.config.bits_per_frame());
    Bits input;
    if (!bits_in.empty()) {
        input = read_bits_file(bits_in);
        if (input.empty()) throw ConfigError("bits-in", "bits file '" + bits_in + "' is empty");
        s.frames = static_cast<int>((input.size() + frame_bits - 1) / frame_bits);
    } else {
        std::mt19937_64 rng(s.channel.rng_seed);
        input.resize(frame_bits * s.frames);
        for (auto& b : input) b = static_cast<std::uint8_t>(rng() & 1u);
    }
    Bits padded = input;
    padded.resize(frame_bits * s.frames, 0);

    const fs::path dir = output_dir(f);
    fs::create_directories(dir);

    SampleStream all_rx;
    all_rx.sample_period_s = s.config.elementary_period_s;
    std::vector<RxSymbol> all_symbols;
    Bits recovered;
    std::vector<double> passband;
    std::optional<TimingEstimate> last_estimate;
    for (int m = 0; m < s.frames; ++m) {
        const std::span<const std::uint8_t> frame_span(padded.data() + m * frame_bits, frame_bits);
        const SampleStream tx = build_frame(s.config, frame_span, m);
        if (s.passband) {
            const auto pb = to_passband(tx, s.config, s.passband_options);
            passband.insert(passband.end(), pb.begin(), pb.end());
        }
        const SampleStream rx = through_channel(s, tx, s.channel.rng_seed + 1 + static_cast<std::uint64_t>(m));
        const auto estimate = estimate_for_mode(s.config, rx, s.mode, true_shift(s), s.sync_symbols);
        auto symbols = receive_frame_symbols(s.config, rx, estimate, s.derotate);
        for (auto& sym : symbols) {
            const auto b = demap_qam4(sym.carriers);
            recovered.insert(recovered.end(), b.begin(), b.end());
            sym.symbol_index_l += m * s.config.symbols_per_frame;
            all_symbols.push_back(std::move(sym));
        }
        all_rx.samples.insert(all_rx.samples.end(), rx.samples.begin(), rx.samples.end());
        last_estimate = estimate;
    }
    recovered.resize(input.size());

    write_sample_stream(all_rx, (dir / "rx_stream.c64").string());
    {
        auto csv = open_in(dir, "constellation.csv");
        write_constellation_csv(csv, s.config, all_symbols);
    }
    {
        auto o = open_in(dir, "bits_in.txt");
        write_bits(o, input);
    }
    {
        auto o = open_in(dir, "bits_out.txt");
        write_bits(o, recovered);
    }
    if (s.passband) {
        std::ofstream pb(dir / "passband.f64", std::ios::binary);
        pb.write(reinterpret_cast<const char*>(passband.data()),
                 static_cast<std::streamsize>(passband.size() * sizeof(double)));
    }
    write_manifest(dir, "txrx", f, s.channel.rng_seed, resolved_run_text(s));

    std::int64_t errors = 0;
    for (std::size_t i = 0; i < input.size(); ++i) errors += input[i] != recovered[i];
    out << "bits=" << input.size() << " errors=" << errors
        << " ber=" << format_double(static_cast<double>(errors) / static_cast<double>(input.size()));
    if (last_estimate) out << " delta_hat=" << last_estimate->signed_delta();
    out << '\n';
    return kExitOk;
}

int cmd_metric(const CommonFlags& f, int sync_flag, std::ostream& out) {
    auto kv = load_keys(f);
    apply_run_flags(kv, f);
    if (sync_flag > 0) kv.set("sync_symbols", std::to_string(sync_flag));
    const RunSettings s = resolve_run(kv);

    std::mt19937_64 rng(s.channel.rng_seed);
    Bits bits(static_cast<std::size_t>(s.config.bits_per_frame()));
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
    const SampleStream rx = through_channel(s, build_frame(s.config, bits), s.channel.rng_seed + 1);

    const auto trace = cp_timing_metric(rx, s.config, search_span(s.config, s.sync_symbols, rx.size()));
    const auto estimate = estimate_offset(trace, s.sync_symbols);

    const fs::path dir = output_dir(f);
    fs::create_directories(dir);
    {
        auto csv = open_in(dir, "metric.csv");
        write_trace_csv(csv, trace);
    }
    {
        auto csv = open_in(dir, "metric_avg.csv");
        write_trace_csv(csv, estimate.trace);
    }
    write_manifest(dir, "metric", f, s.channel.rng_seed, resolved_run_text(s));
    out << "peak_lag=" << estimate.delta_hat << " peak_value=" << format_double(estimate.confidence)
        << " symbols_averaged=" << s.sync_symbols << '\n';
    return kExitOk;
}

int cmd_sweep(const CommonFlags& f, std::ostream& out, std::ostream& err) {
    auto kv = load_keys(f);
    kv.require_known(experiment_key_names());
    if (!f.guard.empty()) kv.set("guard_fraction", f.guard);
    if (!f.seed.empty()) kv.set("seed", f.seed);
    if (!f.snr_db.empty()) kv.set("snr_grid_db", f.snr_db);
    if (!f.offset.empty()) kv.set("offsets", f.offset);
    if (!f.mode.empty()) kv.set("estimator_mode", f.mode);
    if (!f.direction.empty()) kv.set("offset_direction", f.direction);
    if (f.derotate) kv.set("derotate", "true");
    const ExperimentSpec spec = experiment_from_keys(kv);

    const fs::path dir = output_dir(f);
    fs::create_directories(dir);
    write_manifest(dir, "sweep", f, spec.seed, experiment_to_text(spec));

    auto csv = open_in(dir, "ber.csv");
    const auto records = sweep(spec, &csv, [&err](const BerRecord& r) {
        err << "[sweep] mode=" << to_string(r.mode) << " offset=" << r.offset << " snr_db=" << format_double(r.snr_db)
            << " ebn0_db=" << format_double(r.ebn0_db) << " bits=" << r.bits << " errors=" << r.errors
            << " ber=" << format_double(r.ber) << '\n';
    });
    const auto summary = required_snr(records, spec.target_ber);
    {
        auto s = open_in(dir, "summary.csv");
        write_summary_csv(s, summary, spec);
    }
    for (const auto& r : summary) {
        out << "mode=" << to_string(r.mode) << " offset=" << r.offset << " required_snr_db="
            << (r.bracketed ? format_double(r.snr_db) : "unbracketed")
            << " required_ebn0_db=" << (r.bracketed ? format_double(r.ebn0_db) : "unbracketed") << '\n';
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"DVB-T 2K OFDM timing-synchronization simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", OFDMSYNC_VERSION);

    CommonFlags txrx_flags, metric_flags, sweep_flags;
    std::string bits_in;
    int sync_symbols = 0;

    auto* txrx = app.add_subcommand("txrx", "transmit, pass through the channel, receive");
    add_common(*txrx, txrx_flags);
    txrx->add_option("--bits-in", bits_in, "text file of 0/1 bits to send (default: random)");

    auto* metric = app.add_subcommand("metric", "export the CP timing metric trace for one frame");
    add_common(*metric, metric_flags);
    metric->add_option("--sync-symbols", sync_symbols, "symbols averaged by the estimator")->check(CLI::PositiveNumber);

    auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo BER grid and required-SNR summary");
    add_common(*sweep_cmd, sweep_flags);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("ofdmsync");
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*txrx) return cmd_txrx(txrx_flags, bits_in, out);
        if (*metric) return cmd_metric(metric_flags, sync_symbols, out);
        if (*sweep_cmd) return cmd_sweep(sweep_flags, out, err);
    } catch (const ConfigError& e) {
        err << "ofdmsync: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        err << "ofdmsync: invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "ofdmsync: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}

}  // namespace ofdmsync::cli
