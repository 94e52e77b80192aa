import math

import numpy as np
import pytest

from hotcold.channel import (
    MIN_DISTANCE_M,
    SPEED_OF_LIGHT_M_S,
    ChannelParams,
    invert_rssi_to_distance,
    max_range_m,
    noiseless_rssi,
    path_loss,
    reference_loss_db,
    rssi,
    sample_shadowing,
)
from hotcold.geometry import Vec2

PARAMS = ChannelParams()  # 0 dBm, 0/2 dBi, 2.4 GHz, n=2.8, -94 dBm


def test_reference_loss_constants():
    # frequency term and Friis constant evaluated independently
    assert 20.0 * math.log10(2.4e9) == pytest.approx(187.60, abs=0.01)
    assert 20.0 * math.log10(4.0 * math.pi / SPEED_OF_LIGHT_M_S) == pytest.approx(-147.55, abs=0.01)
    assert reference_loss_db(PARAMS) == pytest.approx(40.05, abs=0.01)


def test_path_loss_at_one_meter():
    assert path_loss(1.0, PARAMS, 0.0) == pytest.approx(40.05, abs=0.01)


def test_path_loss_doubling_distance():
    diff = path_loss(2.0, PARAMS, 0.0) - path_loss(1.0, PARAMS, 0.0)
    assert diff == pytest.approx(28.0 * math.log10(2.0), abs=1e-9)
    assert diff == pytest.approx(8.4289, abs=1e-4)


def test_path_loss_shadow_term_is_additive():
    assert path_loss(7.3, PARAMS, 5.0) - path_loss(7.3, PARAMS, 0.0) == pytest.approx(
        5.0, abs=1e-12
    )


def test_path_loss_rejects_below_floor():
    with pytest.raises(ValueError):
        path_loss(0.05, PARAMS)
    with pytest.raises(ValueError):
        path_loss(1.0, PARAMS, math.nan)


def test_path_loss_slope_is_ten_n_per_decade():
    for d in (0.5, 2.0, 9.0):
        assert path_loss(10.0 * d, PARAMS) - path_loss(d, PARAMS) == pytest.approx(
            10.0 * PARAMS.path_loss_exponent, abs=1e-9
        )


def test_rssi_at_halt_distance():
    # the 3 m halt-distance operating point
    assert noiseless_rssi(3.0, PARAMS) == pytest.approx(-51.41, abs=0.01)


def test_rssi_near_sensitivity_boundary():
    assert noiseless_rssi(99.6, PARAMS) == pytest.approx(-94.0, abs=0.01)
    rng = np.random.default_rng(0)
    assert rssi(Vec2(0.0, 0.0), Vec2(99.5, 0.0), PARAMS, rng).in_range
    assert not rssi(Vec2(0.0, 0.0), Vec2(99.7, 0.0), PARAMS, rng).in_range
    assert not rssi(Vec2(0.0, 0.0), Vec2(150.0, 0.0), PARAMS, rng).in_range


def test_rssi_clamps_tiny_distances():
    rng = np.random.default_rng(0)
    at_zero = rssi(Vec2(0.0, 0.0), Vec2(0.0, 0.0), PARAMS, rng)
    assert at_zero.value_dbm == noiseless_rssi(MIN_DISTANCE_M, PARAMS)


def test_invert_round_trip():
    assert invert_rssi_to_distance(noiseless_rssi(3.0, PARAMS), PARAMS) == pytest.approx(
        3.0, abs=1e-6
    )
    assert invert_rssi_to_distance(-38.05, PARAMS) == pytest.approx(1.0, abs=1e-3)
    for d in range(1, 101):
        d_hat = invert_rssi_to_distance(noiseless_rssi(float(d), PARAMS), PARAMS)
        assert abs(d_hat - d) / d < 1e-9


def test_max_range():
    assert max_range_m(PARAMS) == pytest.approx(99.6, abs=0.1)
    # sensitivity set to the signal level at 1 m leaves exactly 1 m of range
    snug = ChannelParams(rx_sensitivity_dbm=noiseless_rssi(1.0, PARAMS))
    assert max_range_m(snug) == pytest.approx(1.0, abs=1e-9)
    # one distance-doubling of margin doubles the range (slope 10n)
    wider = ChannelParams(rx_sensitivity_dbm=PARAMS.rx_sensitivity_dbm - 8.4289)
    assert max_range_m(wider) / max_range_m(PARAMS) == pytest.approx(2.0, abs=1e-4)


def test_monotone_in_distance_without_shadowing():
    values = [noiseless_rssi(d, PARAMS) for d in np.linspace(0.5, 120.0, 200)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_sample_shadowing_zero_sigma_is_exactly_zero():
    rng = np.random.default_rng(7)
    assert sample_shadowing(rng, 0.0) == 0.0
    with pytest.raises(ValueError):
        sample_shadowing(rng, -1.0)


def test_sample_shadowing_statistics():
    rng = np.random.default_rng(11)
    samples = np.array([sample_shadowing(rng, 3.0) for _ in range(10**6)])
    assert abs(samples.mean()) < 0.02
    assert abs(samples.std() - 3.0) < 0.02


def test_sample_shadowing_deterministic_stream():
    a = [sample_shadowing(np.random.default_rng(5), 2.0) for _ in range(1)]
    b = [sample_shadowing(np.random.default_rng(5), 2.0) for _ in range(1)]
    assert a == b
    rng1, rng2 = np.random.default_rng(9), np.random.default_rng(9)
    assert [sample_shadowing(rng1, 4.0) for _ in range(100)] == [
        sample_shadowing(rng2, 4.0) for _ in range(100)
    ]


def test_shadowing_distribution_kolmogorov_smirnov():
    from scipy import stats

    params = ChannelParams(shadowing_sigma_db=3.0)
    rng = np.random.default_rng(13)
    base = noiseless_rssi(10.0, params)
    deviates = np.array(
        [rssi(Vec2(0.0, 0.0), Vec2(10.0, 0.0), params, rng).value_dbm - base for _ in range(10**5)]
    )
    assert stats.kstest(deviates / 3.0, "norm").pvalue > 0.01


def test_params_validation():
    with pytest.raises(ValueError):
        ChannelParams(frequency_hz=0.0)
    with pytest.raises(ValueError):
        ChannelParams(path_loss_exponent=0.0)
    with pytest.raises(ValueError):
        ChannelParams(shadowing_sigma_db=-0.5)
    with pytest.raises(ValueError):
        ChannelParams(tx_power_dbm=-100.0)
