from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from ncisac.channel import (
    ChannelMatrix,
    TargetTruth,
    apply_mask,
    steering_range,
    steering_velocity,
    synthesize,
)
from ncisac.config import DurationMode
from ncisac.fista import estimate_lipschitz
from ncisac.occupancy import SelectionIndex, scenario1_mask
from ncisac.transforms import (
    Direction,
    FourierOperator,
    SensingOperator,
    dft,
    idft,
    periodogram_2d,
    range_sensing_operator,
    velocity_sensing_operator,
)


def dft_matrix(n):
    """Unitary DFT matrix from its definition: W[k, j] = exp(-2 pi i k j / n) / sqrt(n)."""
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_impulse_and_constant():
    e0 = np.zeros(16, complex)
    e0[0] = 1
    assert np.allclose(idft(e0), 0.25)
    assert np.allclose(dft(np.full(16, 0.25)), e0)


def test_round_trip_and_parseval(rng):
    v = crandn(rng, 64)
    assert np.allclose(idft(dft(v)), v, atol=1e-10)
    assert np.isclose(np.linalg.norm(dft(v)), np.linalg.norm(v), rtol=1e-10)


def test_steering_peaks(cfg):
    assert int(np.argmax(np.abs(idft(steering_range(cfg))))) == 6
    # 13 m/s sits 2.43 Doppler bins from zero; the 1-based bin 3 maps to
    # 13.39 m/s under the elementary duration
    assert int(np.argmax(np.abs(dft(steering_velocity(cfg))))) == 2
    assert 2 * cfg.velocity_bin_mps(DurationMode.ELEMENTARY) == pytest.approx(13.3929, abs=1e-3)


@pytest.mark.parametrize("direction", list(Direction))
def test_fourier_operator_dense(direction):
    op = FourierOperator(12, direction)
    W = dft_matrix(12)
    expected = W if direction is Direction.FORWARD else W.conj().T
    assert np.max(np.abs(op.dense() - expected)) < 1e-12
    v = np.arange(12) + 1j
    assert np.allclose(op.adjoint(op.apply(v)), v, rtol=1e-10)


def test_full_mask_range_operator_is_dft():
    bits = np.ones(16, bool)
    op = range_sensing_operator(bits)
    assert op.shape == (16, 16)
    assert np.max(np.abs(op.dense() - dft_matrix(16))) < 1e-12


def test_full_mask_velocity_operator_is_unitary():
    op = velocity_sensing_operator(np.ones(8, bool))
    D = op.dense()
    assert np.allclose(D.conj().T @ D, np.eye(8), atol=1e-12)


def dense_range(bits):
    """S (A' o Psi^-1): replicate the mask across columns, multiply, keep the selected rows."""
    n = bits.size
    a_rep = np.tile(bits[:, None].astype(float), (1, n))
    return (a_rep * dft_matrix(n))[np.flatnonzero(bits)]


def dense_velocity(bits):
    """G (U' o Upsilon^-1)^T with Upsilon the DFT matrix."""
    n = bits.size
    u_rep = np.tile(bits[None, :].astype(float), (n, 1))
    return ((u_rep * np.linalg.inv(dft_matrix(n))).T)[np.flatnonzero(bits)]


@settings(max_examples=200, deadline=None)
@given(arrays(bool, st.integers(1, 32)))
def test_range_operator_matches_dense_construction(bits):
    op = range_sensing_operator(bits)
    assert op.shape == (int(bits.sum()), bits.size)
    if bits.any():
        assert np.max(np.abs(op.dense() - dense_range(bits))) < 1e-12


@settings(max_examples=200, deadline=None)
@given(arrays(bool, st.integers(1, 32)))
def test_velocity_operator_matches_dense_construction(bits):
    op = velocity_sensing_operator(bits)
    if bits.any():
        assert np.max(np.abs(op.dense() - dense_velocity(bits))) < 1e-12


def test_exhaustive_masks_small():
    # every mask of length up to 8
    worst = 0.0
    for n in range(1, 9):
        for code in range(1, 2**n):
            bits = np.array([(code >> i) & 1 for i in range(n)], bool)
            worst = max(worst, np.max(np.abs(range_sensing_operator(bits).dense() - dense_range(bits))))
            worst = max(worst, np.max(np.abs(velocity_sensing_operator(bits).dense() - dense_velocity(bits))))
    assert worst < 1e-12


@settings(max_examples=100, deadline=None)
@given(arrays(bool, st.integers(2, 64)), st.booleans(), st.integers(0, 2**32 - 1))
def test_dot_test(bits, velocity, seed):
    if not bits.any():
        bits[0] = True
    op = (velocity_sensing_operator if velocity else range_sensing_operator)(bits)
    rng = np.random.default_rng(seed)
    x = crandn(rng, op.shape[1])
    y = crandn(rng, op.shape[0])
    lhs = np.vdot(y, op.forward(x))
    rhs = np.vdot(op.adjoint(y), x)
    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(lhs))


@settings(max_examples=50, deadline=None)
@given(arrays(bool, st.integers(2, 32)))
def test_norm_at_most_one(bits):
    if not bits.any():
        bits[-1] = True
    s = np.linalg.svd(range_sensing_operator(bits).dense(), compute_uv=False)
    assert s[0] <= 1 + 1e-9
    assert 0 < estimate_lipschitz(range_sensing_operator(bits)) <= 1.05 * (1 + 1e-6)


def test_batched_application(rng):
    bits = np.array([1, 0, 1, 1, 0, 1], bool)
    op = range_sensing_operator(bits)
    X = crandn(rng, 6, 3)
    assert np.allclose(op.forward(X), op.dense() @ X)
    Y = crandn(rng, 4, 3)
    assert np.allclose(op.adjoint(Y), op.dense().conj().T @ Y)


def test_inconsistent_selection_rejected():
    bits = np.array([1, 0, 1, 0], bool)
    with pytest.raises(ValueError):
        range_sensing_operator(bits, SelectionIndex(np.array([0, 1]), 4))
    with pytest.raises(ValueError):
        SensingOperator(SelectionIndex(np.array([0]), 5), FourierOperator(4, Direction.FORWARD), bits)


def test_same_pattern():
    a = range_sensing_operator(np.array([1, 0, 1], bool))
    assert a.same_pattern(range_sensing_operator(np.array([1, 0, 1], bool)))
    assert not a.same_pattern(velocity_sensing_operator(np.array([1, 0, 1], bool)))


def test_forward_model_consistency(cfg):
    """The spectrum of the full noise-free column (row) maps onto its valid samples."""
    mask = scenario1_mask(cfg)
    full = synthesize(cfg, TargetTruth.from_config(cfg), 400.0, seed=0)
    ch = apply_mask(full, mask)
    op = range_sensing_operator(mask.grid[:, 0])
    assert np.max(np.abs(op.forward(idft(full.data[:, 0])) - ch.data[mask.grid[:, 0], 0])) < 1e-9
    vop = velocity_sensing_operator(mask.grid[0])
    assert np.max(np.abs(vop.forward(dft(full.data[0])) - ch.data[0, mask.grid[0]])) < 1e-9


def test_periodogram_peak_noise_free(cfg):
    ch = synthesize(cfg, TargetTruth.from_config(cfg), 400.0, seed=0)
    p = periodogram_2d(ch)
    assert np.unravel_index(np.argmax(p), p.shape) == (6, 2)


def test_periodogram_zero(small_cfg):
    assert not periodogram_2d(ChannelMatrix(np.zeros((8, 4)))).any()


def test_periodogram_masking_raises_sidelobes(cfg):
    """On-grid target so the full-occupancy periodogram is an exact impulse."""
    on_grid = replace(cfg, target_range_m=6 * cfg.range_bin_m, target_velocity_mps=2 * cfg.velocity_bin_mps())
    full = synthesize(on_grid, TargetTruth.from_config(on_grid), 400.0, seed=0)
    masked = apply_mask(full, scenario1_mask(on_grid))

    def side_ratio(p):
        flat = np.sort(p.ravel())
        return flat[-2] / flat[-1]

    assert side_ratio(periodogram_2d(masked)) > side_ratio(periodogram_2d(full))
