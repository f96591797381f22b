#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    args.insert(args.begin(), "ofdmsync");
    const int code = ofdmsync::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("ofdmsync_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("txrx with defaults is error free and writes its artifacts") {
    const auto dir = scratch("txrx");
    const auto r = run({"txrx", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("bits=231880 errors=0 ") != std::string::npos);
    CHECK(slurp(dir / "bits_in.txt") == slurp(dir / "bits_out.txt"));
    for (const char* f : {"rx_stream.c64", "rx_stream.c64.hdr", "constellation.csv", "manifest.txt", "resolved.cfg"}) {
        CHECK(fs::exists(dir / f));
    }
    const auto manifest = slurp(dir / "manifest.txt");
    CHECK(manifest.find("command = txrx") != std::string::npos);
    CHECK(manifest.find("seed = ") != std::string::npos);

    // The resolved configuration replays the run.
    const auto dir2 = scratch("txrx_replay");
    const auto r2 = run({"txrx", "--config", (dir / "resolved.cfg").string(), "--out", dir2.string()});
    CHECK(r2.code == 0);
    CHECK(slurp(dir2 / "bits_out.txt") == slurp(dir / "bits_out.txt"));
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("a malformed config key exits 2 and names the key") {
    const auto dir = scratch("badcfg");
    {
        std::ofstream cfg(dir / "bad.cfg");
        cfg << "guard_fraction = 1/4\nsnr_db = loud\n";
    }
    auto r = run({"txrx", "--config", (dir / "bad.cfg").string(), "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("snr_db") != std::string::npos);
    {
        std::ofstream cfg(dir / "typo.cfg");
        cfg << "gaurd_fraction = 1/4\n";
    }
    r = run({"txrx", "--config", (dir / "typo.cfg").string(), "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("gaurd_fraction") != std::string::npos);
    r = run({"txrx", "--guard", "1/3", "--out", dir.string()});
    CHECK(r.code == 2);
    r = run({"txrx", "--config", (dir / "missing.cfg").string(), "--out", dir.string()});
    CHECK(r.code == 2);
    fs::remove_all(dir);
}

TEST_CASE("metric locates a delay of 7 samples") {
    const auto dir = scratch("metric");
    const auto r = run({"metric", "--offset", "7", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("peak_lag=7 ") != std::string::npos);
    const auto avg = slurp(dir / "metric_avg.csv");
    CHECK(avg.rfind("lag,metric\n", 0) == 0);
    CHECK(fs::exists(dir / "metric.csv"));
    fs::remove_all(dir);
}

TEST_CASE("txrx with the estimator recovers a delayed noisy frame") {
    const auto dir = scratch("txrx_on");
    const auto r = run({"txrx", "--offset", "15", "--snr-db", "20", "--mode", "on", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("errors=0 ") != std::string::npos);
    CHECK(r.out.find("delta_hat=15") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("sweep writes ber and summary tables") {
    const auto dir = scratch("sweep");
    {
        std::ofstream spec(dir / "s.spec");
        spec << "snr_grid_db = 2, 4\noffsets = 0\nestimator_mode = oracle\nmin_bits = 10000\nmax_bits = 10000\n";
    }
    const auto r = run({"sweep", "--spec", (dir / "s.spec").string(), "--out", dir.string()});
    CHECK(r.code == 0);
    const auto ber = slurp(dir / "ber.csv");
    CHECK(std::count(ber.begin(), ber.end(), '\n') == 3);
    CHECK(slurp(dir / "summary.csv").rfind("timing_offset,ber,snr_db,ebn0_db,", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("metric reports the aligned peak and the noisy averaged peak") {
    const auto dir = scratch("metric2");
    auto r = run({"metric", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("peak_lag=0 ") != std::string::npos);
    r = run({"metric", "--offset", "15", "--snr-db", "10", "--sync-symbols", "10", "--seed", "3", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("peak_lag=15 ") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("txrx with an uncorrected delay of 5 writes rotated clusters") {
    const auto dir = scratch("rotated");
    const auto r = run({"txrx", "--offset", "5", "--out", dir.string()});
    CHECK(r.code == 0);
    std::ifstream csv(dir / "constellation.csv");
    std::string line;
    std::getline(csv, line);
    const double expected = -2.0 * 3.14159265358979323846 * 852 * 5 / 2048;
    int checked = 0;
    while (std::getline(csv, line) && checked < 50) {
        double re, im;
        int kp, l;
        char comma;
        std::istringstream row(line);
        row >> re >> comma >> im >> comma >> kp >> comma >> l;
        if (kp != 852) continue;
        // Clusters sit at the ideal quadrant angles plus the rotation.
        double residual = std::atan2(im, re) - expected - 3.14159265358979323846 / 4;
        residual = std::remainder(residual, 3.14159265358979323846 / 2);
        CHECK(std::abs(residual) < 1e-6);
        ++checked;
    }
    CHECK(checked > 0);
    fs::remove_all(dir);
}

TEST_CASE("three-offset sweep gives three summary rows") {
    const auto dir = scratch("sweep3");
    {
        std::ofstream spec(dir / "s.spec");
        spec << "snr_grid_db = 0, 30\noffsets = 1, 5, 15\noffset_direction = advance\nestimator_mode = on\n"
                "derotate = true\nmax_bits = 10000\ntarget_ber = 1e-3\n";
    }
    const auto r = run({"sweep", "--spec", (dir / "s.spec").string(), "--out", dir.string()});
    CHECK(r.code == 0);
    const auto summary = slurp(dir / "summary.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 4);
    CHECK(summary.find("\n1,0.001,") != std::string::npos);
    CHECK(summary.find("\n15,0.001,") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("unknown subcommands and flags exit 2") {
    CHECK(run({"bogus"}).code == 2);
    CHECK(run({"txrx", "--no-such-flag"}).code == 2);
}
