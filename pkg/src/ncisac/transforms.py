"""Unitary DFT/IDFT and the partial-Fourier sensing operators.

Both directions use 1/sqrt(N) scaling, so a row-selected operator never has a
spectral norm above one. Operators are matrix-free; ``dense()`` is for tests.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ncisac.channel import ChannelMatrix
from ncisac.occupancy import SelectionIndex


class Direction(enum.Enum):
    FORWARD = "forward"  # exp(-j 2pi nk/N)
    INVERSE = "inverse"  # exp(+j 2pi nk/N)


def dft(v: np.ndarray, axis: int = 0) -> np.ndarray:
    return np.fft.fft(v, axis=axis, norm="ortho")


def idft(v: np.ndarray, axis: int = 0) -> np.ndarray:
    return np.fft.ifft(v, axis=axis, norm="ortho")


@dataclass(frozen=True)
class FourierOperator:
    size: int
    direction: Direction

    def apply(self, x: np.ndarray) -> np.ndarray:
        return dft(x) if self.direction is Direction.FORWARD else idft(x)

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        return idft(y) if self.direction is Direction.FORWARD else dft(y)

    def dense(self) -> np.ndarray:
        return self.apply(np.eye(self.size, dtype=complex))


@dataclass(frozen=True, eq=False)
class SensingOperator:
    """Row-selected unitary Fourier operator ``x -> base(x)[rows]``.

    Vectors are columns; a 2-D input of shape (n, B) is treated as B
    independent vectors.
    """

    rows: SelectionIndex
    base: FourierOperator
    mask_column: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.mask_column, dtype=bool).copy()
        bits.setflags(write=False)
        object.__setattr__(self, "mask_column", bits)
        if bits.shape != (self.base.size,) or self.rows.parent_len != self.base.size:
            raise ValueError("mask, selection and base operator sizes disagree")
        if not np.array_equal(self.rows.indices, np.flatnonzero(bits)):
            raise ValueError("selection index does not match the ones of the mask")

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.base.size)

    def forward(self, x: np.ndarray) -> np.ndarray:
        return self.base.apply(x)[self.rows.indices]

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        return self.base.adjoint(self.rows.scatter(y))

    def dense(self) -> np.ndarray:
        return self.forward(np.eye(self.base.size, dtype=complex))

    def same_pattern(self, other: "SensingOperator") -> bool:
        return self.base == other.base and np.array_equal(self.mask_column, other.mask_column)


def _as_selection(mask: np.ndarray, sel: SelectionIndex | None) -> SelectionIndex:
    mask = np.asarray(mask, dtype=bool)
    if sel is None:
        return SelectionIndex(np.flatnonzero(mask), mask.size)
    return sel


def range_sensing_operator(mask_col: np.ndarray, sel: SelectionIndex | None = None) -> SensingOperator:
    """Maps a range spectrum to the valid samples of one symbol.

    The full column is the inverse of the unitary IDFT (i.e. the unitary DFT)
    of the spectrum; the mask keeps its available subcarriers.
    """
    sel = _as_selection(mask_col, sel)
    return SensingOperator(sel, FourierOperator(sel.parent_len, Direction.FORWARD), mask_col)


def velocity_sensing_operator(mask_row: np.ndarray, sel: SelectionIndex | None = None) -> SensingOperator:
    """Maps a velocity spectrum to the valid samples of one subcarrier.

    The full row is the unitary IDFT of the spectrum (the DFT matrix is
    symmetric, so its inverse transpose is the IDFT itself).
    """
    sel = _as_selection(mask_row, sel)
    return SensingOperator(sel, FourierOperator(sel.parent_len, Direction.INVERSE), mask_row)


def periodogram_2d(chan: ChannelMatrix) -> np.ndarray:
    """Squared magnitude after IDFT down columns and DFT along rows."""
    return np.abs(dft(idft(chan.data, axis=0), axis=1)) ** 2
