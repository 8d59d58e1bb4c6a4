"""Divided channel matrix for one moving point target in AWGN.

Rows index subcarriers and columns index symbols. Noise is added directly to
the divided entries, so transmitted modulation symbols never need drawing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ncisac.config import SimulationConfig
from ncisac.occupancy import OccupancyMask


class ChannelKind(enum.Enum):
    UNPROCESSED = "unprocessed"
    MASKED = "masked"


@dataclass(frozen=True)
class TargetTruth:
    range_m: float
    velocity_mps: float
    amplitude: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.amplitude == 0:
            raise ValueError("target amplitude must be non-zero")

    @classmethod
    def from_config(cls, cfg: SimulationConfig, amplitude: complex = 1.0 + 0.0j) -> "TargetTruth":
        return cls(cfg.target_range_m, cfg.target_velocity_mps, amplitude)


@dataclass(frozen=True)
class ChannelMatrix:
    data: np.ndarray  # (n_subcarriers, n_symbols) complex
    kind: ChannelKind = ChannelKind.UNPROCESSED

    def __post_init__(self):
        d = np.array(self.data, dtype=complex)
        if d.ndim != 2:
            raise ValueError("channel matrix must be two-dimensional")
        d.setflags(write=False)
        object.__setattr__(self, "data", d)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def scaled(self, factor: complex) -> "ChannelMatrix":
        return ChannelMatrix(self.data * factor, self.kind)


def steering_range(cfg: SimulationConfig, range_m: float | None = None) -> np.ndarray:
    """Per-subcarrier delay phasor exp(-j 2pi f_n 2R/c), with f_n = n*df, n = 1..N_c."""
    r = cfg.target_range_m if range_m is None else range_m
    n = np.arange(1, cfg.n_subcarriers + 1)
    return np.exp(-2j * np.pi * n * cfg.subcarrier_spacing_hz * 2.0 * r / cfg.light_speed_mps)


def steering_velocity(cfg: SimulationConfig, velocity_mps: float | None = None) -> np.ndarray:
    """Per-symbol Doppler phasor exp(j 2pi m T_sym 2 v f_c / c), m = 1..M_sym."""
    v = cfg.target_velocity_mps if velocity_mps is None else velocity_mps
    m = np.arange(1, cfg.n_symbols + 1)
    doppler = 2.0 * v * cfg.carrier_freq_hz / cfg.light_speed_mps
    return np.exp(2j * np.pi * m * cfg.symbol_duration_s * doppler)


def noise_variance(amplitude: complex, snr_db: float) -> float:
    return float(abs(amplitude) ** 2 * 10.0 ** (-snr_db / 10.0))


def synthesize(
    cfg: SimulationConfig,
    truth: TargetTruth,
    snr_db: float,
    seed,
    mask: OccupancyMask | None = None,
) -> ChannelMatrix:
    """Noisy divided channel matrix at per-sample SNR ``snr_db``.

    Without ``mask`` every entry carries the target; with it, unavailable
    entries hold noise only (licensed users occupy them), which is what the
    plain 2D-FFT baseline sees before any masking. ``seed`` is anything
    ``numpy.random.default_rng`` accepts.
    """
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    signal = truth.amplitude * np.outer(
        steering_range(cfg, truth.range_m), steering_velocity(cfg, truth.velocity_mps)
    )
    if mask is not None:
        if mask.shape != signal.shape:
            raise ValueError(f"mask shape {mask.shape} does not match channel {signal.shape}")
        signal = signal * mask.grid
    rng = np.random.default_rng(seed)
    sigma = np.sqrt(noise_variance(truth.amplitude, snr_db) / 2.0)
    noise = sigma * (rng.standard_normal(signal.shape) + 1j * rng.standard_normal(signal.shape))
    return ChannelMatrix(signal + noise, ChannelKind.UNPROCESSED)


def apply_mask(chan: ChannelMatrix, mask: OccupancyMask) -> ChannelMatrix:
    if chan.shape != mask.shape:
        raise ValueError(f"mask shape {mask.shape} does not match channel {chan.shape}")
    return ChannelMatrix(np.where(mask.grid, chan.data, 0.0), ChannelKind.MASKED)


def save_channel_csv(chan: ChannelMatrix, path: str | Path) -> None:
    """Debug dump: one row per subcarrier, ``re,im`` pairs per symbol."""
    d = chan.data
    pairs = np.empty((d.shape[0], 2 * d.shape[1]))
    pairs[:, 0::2] = d.real
    pairs[:, 1::2] = d.imag
    np.savetxt(path, pairs, delimiter=",", fmt="%.17g")
