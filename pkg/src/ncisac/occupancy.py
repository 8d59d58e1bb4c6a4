"""Spectrum occupancy grids and the index sets that select valid samples.

A grid has one row per subcarrier and one column per symbol; column ``m`` is
the occupancy sequence of symbol ``m``. Selection "matrices" are kept as
sorted index arrays and applied by gathering.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ncisac.config import SimulationConfig


class ParityError(ValueError):
    """Scenario layouts split counts in half and need them even."""


@dataclass(frozen=True)
class SelectionIndex:
    indices: np.ndarray
    parent_len: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.intp)
        if idx.ndim != 1:
            raise ValueError("indices must be one-dimensional")
        if idx.size and (np.any(np.diff(idx) <= 0) or idx[0] < 0 or idx[-1] >= self.parent_len):
            raise ValueError("indices must be strictly increasing and inside [0, parent_len)")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return int(self.indices.size)

    def gather(self, v: np.ndarray) -> np.ndarray:
        return np.asarray(v)[self.indices]

    def scatter(self, values: np.ndarray) -> np.ndarray:
        """Adjoint of :meth:`gather`: place values into a zero vector of parent length."""
        values = np.asarray(values)
        out = np.zeros((self.parent_len,) + values.shape[1:], dtype=np.result_type(values, complex))
        out[self.indices] = values
        return out

    def as_bits(self) -> np.ndarray:
        bits = np.zeros(self.parent_len, dtype=bool)
        bits[self.indices] = True
        return bits


@dataclass(frozen=True)
class OccupancyMask:
    grid: np.ndarray  # (n_subcarriers, n_symbols) bool

    def __post_init__(self):
        g = np.asarray(self.grid)
        if g.ndim != 2:
            raise ValueError("occupancy grid must be two-dimensional")
        if not np.isin(g, (0, 1)).all():
            raise ValueError("occupancy grid entries must be 0 or 1")
        g = g.astype(bool, copy=True)
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    @property
    def shape(self) -> tuple[int, int]:
        return self.grid.shape

    @property
    def n_subcarriers(self) -> int:
        return self.grid.shape[0]

    @property
    def n_symbols(self) -> int:
        return self.grid.shape[1]

    def column_counts(self) -> np.ndarray:
        return self.grid.sum(axis=0)

    def row_counts(self) -> np.ndarray:
        return self.grid.sum(axis=1)

    def __eq__(self, other) -> bool:
        return isinstance(other, OccupancyMask) and np.array_equal(self.grid, other.grid)

    __hash__ = None


def edge_pattern(n_sub: int, n_occ: int) -> np.ndarray:
    """First and last ``n_occ/2`` subcarriers available, centre block empty."""
    if n_occ % 2:
        raise ParityError(f"n_occupied must be even, got {n_occ}")
    col = np.zeros(n_sub, dtype=bool)
    half = n_occ // 2
    col[:half] = True
    if half:
        col[n_sub - half :] = True
    return col


def scenario1_mask(cfg: SimulationConfig) -> OccupancyMask:
    """Static occupancy: every symbol uses the edge bands."""
    col = edge_pattern(cfg.n_subcarriers, cfg.n_occupied)
    return OccupancyMask(np.tile(col[:, None], (1, cfg.n_symbols)))


def scenario2_mask(cfg: SimulationConfig) -> OccupancyMask:
    """Occupancy switched halfway through the frame.

    The first half of the symbols use the edge bands, the second half the
    complementary centre block.
    """
    if cfg.n_symbols % 2:
        raise ParityError(f"n_symbols must be even, got {cfg.n_symbols}")
    edge = edge_pattern(cfg.n_subcarriers, cfg.n_occupied)
    grid = np.empty((cfg.n_subcarriers, cfg.n_symbols), dtype=bool)
    half = cfg.n_symbols // 2
    grid[:, :half] = edge[:, None]
    grid[:, half:] = ~edge[:, None]
    return OccupancyMask(grid)


def full_mask(cfg: SimulationConfig) -> OccupancyMask:
    return OccupancyMask(np.ones((cfg.n_subcarriers, cfg.n_symbols), dtype=bool))


def column_selection(mask: OccupancyMask, m: int) -> SelectionIndex:
    if not 0 <= m < mask.n_symbols:
        raise IndexError(f"symbol index {m} out of range [0, {mask.n_symbols})")
    return SelectionIndex(np.flatnonzero(mask.grid[:, m]), mask.n_subcarriers)


def row_selection(mask: OccupancyMask, n: int) -> SelectionIndex:
    if not 0 <= n < mask.n_subcarriers:
        raise IndexError(f"subcarrier index {n} out of range [0, {mask.n_subcarriers})")
    return SelectionIndex(np.flatnonzero(mask.grid[n, :]), mask.n_symbols)


def load_mask_csv(path: str | Path) -> OccupancyMask:
    """Read an N_c x M_sym 0/1 CSV (no header, row i = subcarrier i)."""
    grid = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    if not np.isin(grid, (0.0, 1.0)).all():
        raise ValueError(f"{path}: mask entries must be 0 or 1")
    return OccupancyMask(grid.astype(bool))


def save_mask_csv(mask: OccupancyMask, path: str | Path) -> None:
    np.savetxt(path, mask.grid.astype(int), fmt="%d", delimiter=",")
