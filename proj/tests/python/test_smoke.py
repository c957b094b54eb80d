import math

import pytest

import fdcancel as fd


def test_version():
    assert fd.__version__ == "0.1.0"


def test_ofdm_frame_shape_and_power():
    cfg = fd.OfdmConfig()
    cfg.num_symbols = 4
    cfg.tx_power_dbm = 0.0
    buf = fd.generate_ofdm(cfg, 1)
    assert len(buf) == 4 * (2048 + 144)
    assert buf.rate_hz == fd.BASE_RATE_HZ
    assert fd.mean_power_mw(buf) == pytest.approx(1.0, abs=1e-9)

    up = fd.upsample_shape(buf, 4)
    assert len(up) == 4 * len(buf)
    assert up.rate_hz == fd.SIM_RATE_HZ


def test_ofdm_determinism():
    cfg = fd.OfdmConfig()
    cfg.num_symbols = 2
    a = fd.generate_ofdm(cfg, 7)
    b = fd.generate_ofdm(cfg, 7)
    c = fd.generate_ofdm(cfg, 8)
    assert a.samples == b.samples
    assert a.samples != c.samples


def test_coherence_weight():
    model = fd.PhaseNoiseModel()
    k = fd.coherence_weight(model, 150e-9)
    expect = math.exp(-0.5 * 8.5095e-5 * 150e-9 * 122.88e6)
    assert k == pytest.approx(expect, rel=1e-12)


def test_residual_theory_floor():
    model = fd.PhaseNoiseModel()
    assert fd.residual_theory(-30.0, model, 0.0, -90.0) == pytest.approx(-90.0, abs=1e-9)


def test_delay_quantization():
    assert fd.delay_to_samples(8.1380, 122.88e6) == 1
    assert fd.realized_delay_ns(100.0, 122.88e6) == pytest.approx(12 / 122.88e6 * 1e9)


def test_masks_window():
    cfg = fd.CancellerConfig()
    cfg.n_refs = 2
    cfg.taps_per_branch = 32
    cfg.ref_delays_ns = [0.0, 100.0]
    ts = 1.0 / 30.72e6
    cfg.sample_period_s = ts
    cfg.ref_spacing_s = 4 * ts
    cfg.digital_delay_ns = 8 * ts * 1e9
    masks = fd.compute_masks(cfg)
    assert len(masks) == 2
    active = [i for i, v in enumerate(masks[0].entries) if v]
    assert active == [5, 6, 7, 8, 9]


def test_config_rejects_nonsense():
    with pytest.raises(ValueError):
        fd.preset_by_name("fig99")


def test_small_scenario_run():
    p = fd.preset_fig2()
    p.sweep_values_ns = [0.0]
    p.seeds = [1]
    p.ofdm.num_symbols = 20
    p.curves = [p.curves[0]]
    res = fd.run_scenario(p)
    assert len(res.rows) == 1
    row = res.rows[0]
    assert row.converged
    assert row.residual_dbm_mean < -80.0
    assert row.theory_dbm == pytest.approx(-90.0, abs=0.01)
    assert "sweep_value_ns" in fd.csv_text(res).splitlines()[0]
