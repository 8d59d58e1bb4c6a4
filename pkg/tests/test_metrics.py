import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ncisac.config import DurationMode
from ncisac.metrics import (
    GainParams,
    gain_range,
    gain_velocity,
    psr_db,
    resolution,
    rmse,
    rmse_bounds,
    snr_of_sequence,
    spectrum_snr,
    true_range_bin,
    true_velocity_bin,
)
from ncisac.spectrum import Axis, Method, PowerSpectrum


def test_snr_of_sequence(rng):
    x = rng.standard_normal(100) + 1j * rng.standard_normal(100)
    assert snr_of_sequence(x, x) == pytest.approx(1.0)
    n = 200_000
    noise = math.sqrt(0.05) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    sig = np.exp(2j * np.pi * rng.random(n))
    assert snr_of_sequence(sig, noise) == pytest.approx(10.0, rel=0.05)
    with pytest.raises(ValueError):
        snr_of_sequence(sig[:3], np.zeros(3))
    with pytest.raises(ValueError):
        snr_of_sequence(sig[:3], noise[:4])


def test_psr():
    imp = np.zeros(16)
    imp[3] = 1.0
    assert psr_db(imp) == math.inf
    two = np.zeros(16)
    two[[2, 9]] = 5.0
    assert psr_db(two) == pytest.approx(0.0)
    ten = np.full(16, 0.1)
    ten[0] = 1.0
    assert psr_db(PowerSpectrum(ten, Axis.RANGE)) == pytest.approx(10.0)
    # bins adjacent to the peak (circularly) are excluded
    wrap = np.zeros(8)
    wrap[[0, 7, 1]] = [1.0, 0.9, 0.9]
    assert psr_db(wrap) == math.inf
    assert psr_db(wrap, exclusion=0) == pytest.approx(10 * math.log10(1 / 0.9))
    with pytest.raises(ValueError):
        psr_db(np.ones(3))
    with pytest.raises(ValueError):
        psr_db(np.zeros(8))


def test_psr_floor():
    s = np.zeros(10)
    s[0] = 1.0
    s[5] = 0.5e-12
    assert psr_db(s) == math.inf
    s[5] = 2e-12
    assert math.isfinite(psr_db(s))


def test_spectrum_snr():
    s = np.zeros(10)
    s[4] = 1.0
    assert spectrum_snr(s) == math.inf
    s[:] = 1.0
    assert spectrum_snr(s) == pytest.approx(1.0)


def test_rmse():
    assert rmse([117.0, 117.0], 117.0) == 0
    assert rmse([120.0], 117.0) == 3.0
    assert rmse([117.1875] * 50, 117.0) == pytest.approx(0.1875)
    with pytest.raises(ValueError):
        rmse([], 1.0)


def test_gain_examples(cfg):
    p = GainParams.from_config(cfg, 1.0, 0.0)
    assert gain_range(p, Method.JCMSA) == pytest.approx(957.86, abs=0.01)
    assert gain_range(p, Method.PLAIN_2DFFT) == 128.0
    assert gain_range(p, Method.JCMSA) == gain_range(p, Method.MASKED_2DFFT)
    assert gain_velocity(p, Method.JCMSA) == gain_velocity(p, Method.MASKED_2DFFT) == 16 * 14
    assert gain_velocity(p, Method.PLAIN_2DFFT) == 14


def test_gain_params_validation():
    with pytest.raises(ValueError):
        GainParams(14, 600, 512, 1.0)
    with pytest.raises(ValueError):
        GainParams(14, 256, 512, 0.0)
    with pytest.raises(ValueError):
        GainParams(14, 256, 512, 1.0, -1.0)
    with pytest.raises(ValueError):
        GainParams(0, 256, 512, 1.0)


def test_resolution(cfg):
    assert resolution(cfg, Method.JCMSA)[0] == 19.53125
    assert resolution(cfg, Method.PLAIN_2DFFT)[0] == 39.0625
    assert resolution(cfg, Method.JCMSA, DurationMode.SYMBOL_TOTAL)[1] == pytest.approx(5.3567, abs=1e-4)
    for mode in DurationMode:
        jc = resolution(cfg, Method.JCMSA, mode)
        ff = resolution(cfg, Method.PLAIN_2DFFT, mode)
        assert jc[0] == ff[0] / 2 and jc[1] == ff[1] / 2


def test_true_bins(cfg):
    assert true_range_bin(cfg) == 7
    assert true_velocity_bin(cfg) == 3
    assert true_velocity_bin(cfg, DurationMode.ELEMENTARY) == 3


def test_rmse_bounds(cfg):
    b = rmse_bounds(cfg, DurationMode.SYMBOL_TOTAL)
    assert b.range_upper == pytest.approx(9863.47, abs=0.01)
    assert b.range_lower == pytest.approx(0.1875)
    assert b.velocity_upper == pytest.approx(56.56, abs=0.2)
    e = rmse_bounds(cfg, DurationMode.ELEMENTARY)
    assert e.velocity_lower == pytest.approx(0.3929, abs=1e-3)


def gain_params(fista_gain):
    # noise variance and FISTA gain stay within a span where adding the gain
    # to the baseline term is resolvable in double precision
    return st.builds(
        lambda m, n_sub, frac, s2, w: GainParams(m, max(1, round(frac * n_sub)), n_sub, s2, w),
        st.integers(1, 64),
        st.integers(1, 4096),
        st.floats(0, 1),
        st.floats(1e-3, 1e3),
        fista_gain,
    )


params = gain_params(st.just(0.0))


@given(gain_params(st.floats(1e-3, 1e3)))
def test_gain_ordering_with_solver_gain(p):
    """Strict ordering with a positive FISTA gain.

    The FFT comparisons degenerate to equalities at a single symbol with full
    occupancy (range) or a single occupied subcarrier (velocity).
    """
    assert gain_range(p, Method.JCMSA) > gain_range(p, Method.MASKED_2DFFT)
    assert gain_velocity(p, Method.JCMSA) > gain_velocity(p, Method.MASKED_2DFFT)
    if p.m_sym >= 2 or p.n_occ < p.n_sub:
        assert gain_range(p, Method.MASKED_2DFFT) > gain_range(p, Method.PLAIN_2DFFT)
    if p.n_occ >= 2:
        assert gain_velocity(p, Method.MASKED_2DFFT) > gain_velocity(p, Method.PLAIN_2DFFT)


@given(params)
def test_gain_ordering_without_solver_gain(p):
    assert gain_range(p, Method.JCMSA) == gain_range(p, Method.MASKED_2DFFT)
    assert gain_velocity(p, Method.JCMSA) == gain_velocity(p, Method.MASKED_2DFFT)
    if p.n_occ < p.n_sub * math.sqrt(p.m_sym):
        assert gain_range(p, Method.JCMSA) > gain_range(p, Method.PLAIN_2DFFT)
    if p.n_occ > 1:
        assert gain_velocity(p, Method.JCMSA) > gain_velocity(p, Method.PLAIN_2DFFT)
