#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "ofdmsync/channel.hpp"
#include "ofdmsync/dvbt_params.hpp"
#include "ofdmsync/harness.hpp"
#include "ofdmsync/keyvalue.hpp"
#include "ofdmsync/rxchain.hpp"
#include "ofdmsync/timing_sync.hpp"
#include "ofdmsync/txchain.hpp"

namespace py = pybind11;
using namespace ofdmsync;

namespace {

using complex_array = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;
using bit_array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v) {
    py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

template <typename T, typename A>
std::vector<T> from_array(const A& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
    return std::vector<T>(a.data(), a.data() + a.size());
}

SampleStream stream_from(const complex_array& samples, double sample_period_s, std::int64_t origin_index) {
    SampleStream s;
    s.samples = from_array<cplx>(samples);
    s.sample_period_s = sample_period_s;
    s.origin_index = origin_index;
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "DVB-T 2K OFDM simulator with cyclic-prefix timing estimation";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<GuardFraction>(m, "GuardFraction")
        .def_static("parse", &GuardFraction::parse)
        .def_static("from_ratio", &GuardFraction::from_ratio)
        .def_property_readonly("denominator", &GuardFraction::denominator)
        .def_property_readonly("value", &GuardFraction::value)
        .def("__str__", &GuardFraction::to_string)
        .def("__repr__", [](const GuardFraction& g) { return "GuardFraction(" + g.to_string() + ")"; });

    py::class_<DvbtConfig>(m, "DvbtConfig")
        .def_readwrite("elementary_period_s", &DvbtConfig::elementary_period_s)
        .def_readwrite("fft_size", &DvbtConfig::fft_size)
        .def_readwrite("active_carriers", &DvbtConfig::active_carriers)
        .def_readwrite("k_min", &DvbtConfig::k_min)
        .def_readwrite("k_max", &DvbtConfig::k_max)
        .def_readwrite("useful_duration_s", &DvbtConfig::useful_duration_s)
        .def_readwrite("carrier_spacing_hz", &DvbtConfig::carrier_spacing_hz)
        .def_readwrite("guard_fraction", &DvbtConfig::guard_fraction)
        .def_readwrite("guard_samples", &DvbtConfig::guard_samples)
        .def_readwrite("symbol_duration_s", &DvbtConfig::symbol_duration_s)
        .def_readwrite("symbols_per_frame", &DvbtConfig::symbols_per_frame)
        .def_readwrite("frames_per_superframe", &DvbtConfig::frames_per_superframe)
        .def_readwrite("constellation_order", &DvbtConfig::constellation_order)
        .def_property_readonly("guard_duration_s", &DvbtConfig::guard_duration_s)
        .def_property_readonly("symbol_samples", &DvbtConfig::symbol_samples)
        .def_property_readonly("bits_per_frame", &DvbtConfig::bits_per_frame)
        .def("validate", &DvbtConfig::validate)
        .def("to_text", [](const DvbtConfig& c) { return config_to_text(c); })
        .def("__eq__", [](const DvbtConfig& a, const DvbtConfig& b) { return a == b; });

    m.def("make_2k_config", [](const std::string& guard) { return make_2k_config(GuardFraction::parse(guard)); },
          py::arg("guard") = "1/4");
    m.def("config_from_text", [](const std::string& text) { return config_from_keys(KeyValueMap::parse(text)); });
    m.def("carrier_to_bin", &carrier_to_bin, py::arg("config"), py::arg("k"));

    m.def(
        "map_bits_qam4", [](const bit_array& bits) { return to_array(map_bits_qam4(from_array<std::uint8_t>(bits))); },
        py::arg("bits"));
    m.def(
        "demap_qam4", [](const complex_array& s) { return to_array(demap_qam4(from_array<cplx>(s))); },
        py::arg("symbols"));
    m.def(
        "build_frame",
        [](const DvbtConfig& c, const bit_array& bits, int frame_index) {
            return to_array(build_frame(c, from_array<std::uint8_t>(bits), frame_index).samples);
        },
        py::arg("config"), py::arg("bits"), py::arg("frame_index") = 0);

    m.def(
        "apply_timing_offset",
        [](const complex_array& x, std::int64_t delta) {
            return to_array(apply_timing_offset(stream_from(x, 0.0, 0), delta).samples);
        },
        py::arg("samples"), py::arg("delta"));
    m.def(
        "apply_timing_advance",
        [](const complex_array& x, std::int64_t delta) {
            return to_array(apply_timing_advance(stream_from(x, 0.0, 0), delta).samples);
        },
        py::arg("samples"), py::arg("delta"));
    m.def(
        "add_awgn",
        [](const complex_array& x, double snr_db, std::uint64_t seed) {
            return to_array(add_awgn(stream_from(x, 0.0, 0), snr_db, seed).samples);
        },
        py::arg("samples"), py::arg("snr_db"), py::arg("seed"));

    py::class_<TimingMetricTrace>(m, "TimingMetricTrace")
        .def_property_readonly("lags", [](const TimingMetricTrace& t) { return to_array(t.lags); })
        .def_property_readonly("metric", [](const TimingMetricTrace& t) { return to_array(t.metric); })
        .def_readonly("peak_lag", &TimingMetricTrace::peak_lag)
        .def_readonly("peak_value", &TimingMetricTrace::peak_value)
        .def_readonly("period", &TimingMetricTrace::period);

    py::class_<TimingEstimate>(m, "TimingEstimate")
        .def_readonly("delta_hat", &TimingEstimate::delta_hat)
        .def_readonly("confidence", &TimingEstimate::confidence)
        .def_readonly("trace", &TimingEstimate::trace)
        .def("signed_delta", &TimingEstimate::signed_delta);

    m.def(
        "cp_timing_metric",
        [](const complex_array& x, const DvbtConfig& c, std::int64_t span) {
            return cp_timing_metric(stream_from(x, c.elementary_period_s, 0), c, span);
        },
        py::arg("samples"), py::arg("config"), py::arg("search_span"));
    m.def("estimate_offset", &estimate_offset, py::arg("trace"), py::arg("n_symbols_averaged"));
    m.def("phase_rotation", &phase_rotation, py::arg("config"), py::arg("delta"), py::arg("k_prime"));

    m.def(
        "receive_frame",
        [](const DvbtConfig& c, const complex_array& x, const std::optional<TimingEstimate>& e, bool derotate) {
            return to_array(receive_frame(c, stream_from(x, c.elementary_period_s, 0), e, derotate));
        },
        py::arg("config"), py::arg("samples"), py::arg("estimate") = py::none(), py::arg("derotate") = false);
    m.def(
        "receive_frame_carriers",
        [](const DvbtConfig& c, const complex_array& x, const std::optional<TimingEstimate>& e, bool derotate) {
            const auto syms = receive_frame_symbols(c, stream_from(x, c.elementary_period_s, 0), e, derotate);
            py::array_t<cplx> out({static_cast<py::ssize_t>(syms.size()), static_cast<py::ssize_t>(c.active_carriers)});
            auto* p = out.mutable_data();
            for (const auto& s : syms) p = std::copy(s.carriers.begin(), s.carriers.end(), p);
            return out;
        },
        py::arg("config"), py::arg("samples"), py::arg("estimate") = py::none(), py::arg("derotate") = false);

    py::enum_<EstimatorMode>(m, "EstimatorMode")
        .value("off", EstimatorMode::Off)
        .value("on", EstimatorMode::On)
        .value("oracle", EstimatorMode::Oracle);
    py::enum_<OffsetDirection>(m, "OffsetDirection")
        .value("delay", OffsetDirection::Delay)
        .value("advance", OffsetDirection::Advance);
    py::enum_<SnrAxis>(m, "SnrAxis").value("sample", SnrAxis::Sample).value("ebn0", SnrAxis::EbN0);

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("config", &ExperimentSpec::config)
        .def_readwrite("snr_grid_db", &ExperimentSpec::snr_grid_db)
        .def_readwrite("snr_axis", &ExperimentSpec::snr_axis)
        .def_readwrite("offsets", &ExperimentSpec::offsets)
        .def_readwrite("direction", &ExperimentSpec::direction)
        .def_readwrite("modes", &ExperimentSpec::modes)
        .def_readwrite("derotate", &ExperimentSpec::derotate)
        .def_readwrite("min_bits", &ExperimentSpec::min_bits)
        .def_readwrite("max_bits", &ExperimentSpec::max_bits)
        .def_readwrite("target_errors", &ExperimentSpec::target_errors)
        .def_readwrite("seed", &ExperimentSpec::seed)
        .def_readwrite("sync_symbols", &ExperimentSpec::sync_symbols)
        .def_readwrite("target_ber", &ExperimentSpec::target_ber)
        .def("validate", &ExperimentSpec::validate)
        .def("to_text", [](const ExperimentSpec& s) { return experiment_to_text(s); });
    m.def("experiment_from_text", [](const std::string& text) { return experiment_from_keys(KeyValueMap::parse(text)); });

    py::class_<BerRecord>(m, "BerRecord")
        .def_readonly("snr_db", &BerRecord::snr_db)
        .def_readonly("ebn0_db", &BerRecord::ebn0_db)
        .def_readonly("offset", &BerRecord::offset)
        .def_readonly("mode", &BerRecord::mode)
        .def_readonly("bits", &BerRecord::bits)
        .def_readonly("errors", &BerRecord::errors)
        .def_readonly("ber", &BerRecord::ber)
        .def_readonly("est_failures", &BerRecord::est_failures)
        .def_readonly("frames", &BerRecord::frames)
        .def_readonly("seed", &BerRecord::seed)
        .def_readonly("quoted", &BerRecord::quoted);

    py::class_<RequiredSnr>(m, "RequiredSnr")
        .def_readonly("mode", &RequiredSnr::mode)
        .def_readonly("offset", &RequiredSnr::offset)
        .def_readonly("target_ber", &RequiredSnr::target_ber)
        .def_readonly("snr_db", &RequiredSnr::snr_db)
        .def_readonly("ebn0_db", &RequiredSnr::ebn0_db)
        .def_readonly("bracketed", &RequiredSnr::bracketed);

    m.def("run_point",
          py::overload_cast<const ExperimentSpec&, EstimatorMode, double, std::int64_t>(&run_point), py::arg("spec"),
          py::arg("mode"), py::arg("snr_db"), py::arg("offset"));
    m.def(
        "sweep", [](const ExperimentSpec& s) { return sweep(s); }, py::arg("spec"),
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "required_snr", [](const std::vector<BerRecord>& r, double target) { return required_snr(r, target); },
        py::arg("records"), py::arg("target_ber"));
    m.def("theory_ber_qpsk", py::vectorize(&theory_ber_qpsk), py::arg("ebn0_db"));
    m.def("snr_to_ebn0_db", &snr_to_ebn0_db, py::arg("config"), py::arg("snr_db"));
    m.def("ebn0_to_snr_db", &ebn0_to_snr_db, py::arg("config"), py::arg("ebn0_db"));
}
