"""Accumulated power spectra and peak search."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Method(enum.Enum):
    JCMSA = "jcmsa"
    MASKED_2DFFT = "masked_2dfft"  # zero-filled 2D FFT baseline
    PLAIN_2DFFT = "plain_2dfft"


class Axis(enum.Enum):
    RANGE = "range"
    VELOCITY = "velocity"


@dataclass(frozen=True)
class PowerSpectrum:
    values: np.ndarray
    axis: Axis
    contributing: int = 1

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("spectrum must be a non-empty vector")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("spectrum values must be finite and non-negative")
        if self.contributing < 1:
            raise ValueError("at least one vector must contribute")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size


def peak_search(spectrum: PowerSpectrum | np.ndarray) -> int:
    """1-based index of the global maximum; ties go to the smallest index."""
    values = spectrum.values if isinstance(spectrum, PowerSpectrum) else np.asarray(spectrum)
    if values.size == 0:
        raise ValueError("empty spectrum")
    return int(np.argmax(values)) + 1
