import numpy as np
import pytest

import ofdmsync as ofs


@pytest.fixture
def config():
    return ofs.make_2k_config("1/4")


def random_bits(config, seed):
    return np.random.default_rng(seed).integers(0, 2, config.bits_per_frame, dtype=np.uint8)


def test_numerology(config):
    assert config.fft_size == 2048
    assert config.active_carriers == 1705
    assert config.guard_samples == 512
    assert config.symbol_duration_s == pytest.approx(280e-6)
    assert ofs.carrier_to_bin(config, 0) == 1196


def test_bad_guard_raises():
    with pytest.raises(ValueError):
        ofs.make_2k_config("1/3")


def test_noiseless_round_trip(config):
    bits = random_bits(config, 1)
    frame = ofs.build_frame(config, bits)
    assert frame.shape == (174080,)
    assert np.array_equal(ofs.receive_frame(config, frame), bits)


def test_estimator_recovers_delay(config):
    bits = random_bits(config, 2)
    rx = ofs.add_awgn(ofs.apply_timing_offset(ofs.build_frame(config, bits), 15), 15.0, 3)
    trace = ofs.cp_timing_metric(rx, config, 4 * config.symbol_samples)
    est = ofs.estimate_offset(trace, 4)
    assert est.delta_hat == 15
    assert np.array_equal(ofs.receive_frame(config, rx, est), bits)


def test_theory_and_sweep(config):
    assert ofs.theory_ber_qpsk(0.0) == pytest.approx(0.0786, rel=1e-3)
    spec = ofs.ExperimentSpec()
    spec.config = config
    spec.snr_grid_db = [4.0]
    spec.offsets = [0]
    spec.modes = [ofs.EstimatorMode.oracle]
    spec.max_bits = 10000
    records = ofs.sweep(spec)
    assert len(records) == 1
    assert records[0].bits == config.bits_per_frame
    assert 0 < records[0].ber < 0.5
