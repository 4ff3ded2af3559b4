"""
Input Grids
===========

Uniform partition of an axis-aligned box into cells, and per-level cell
counts of a labeled dataset.
"""

from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np

from ..utils.errors import InvalidParameter, OutOfRegion, TooManyCells

DEFAULT_MAX_CELLS = 100_000
_REGION_TOL = 1e-9


@dataclass(frozen=True)
class Grid:
    """
    Cells tiling ``[low, high]`` with ``shape[k]`` cells along axis k.

    Cell edges along axis k are ``linspace(low[k], high[k], shape[k] + 1)``.
    Cells are numbered in C order (last axis fastest).
    """
    low: np.ndarray
    high: np.ndarray
    shape: tuple
    width: float

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_widths(self) -> np.ndarray:
        return (self.high - self.low) / np.asarray(self.shape)

    @property
    def cell_area(self) -> float:
        return float(np.prod(self.cell_widths))

    @property
    def centers(self) -> np.ndarray:
        """Cell centers of shape (n_cells, d)."""
        axes = [
            self.low[k] + (np.arange(self.shape[k]) + 0.5) * self.cell_widths[k]
            for k in range(self.dim)
        ]
        mesh = np.meshgrid(*axes, indexing='ij')
        return np.column_stack([m.ravel() for m in mesh])

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.all((points >= self.low - _REGION_TOL) & (points <= self.high + _REGION_TOL), axis=1)

    def cell_index(self, points: np.ndarray) -> np.ndarray:
        """
        Flat cell index of each point.

        A point on an interior cell boundary belongs to the lower-index cell.

        Raises:
            OutOfRegion: If a point lies outside the region
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.dim:
            raise InvalidParameter(f"Expected {self.dim}-D points, got shape {points.shape}")
        inside = self.contains(points)
        if not np.all(inside):
            raise OutOfRegion(f"Point {points[~inside][0].tolist()} lies outside [{self.low.tolist()}, {self.high.tolist()}]")
        rel = (points - self.low) / self.cell_widths
        idx = np.ceil(np.round(rel, 9)).astype(int) - 1
        idx = np.clip(idx, 0, np.asarray(self.shape) - 1)
        return np.ravel_multi_index(tuple(idx.T), self.shape)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'low': self.low.tolist(),
            'high': self.high.tolist(),
            'width': self.width,
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> 'Grid':
        return make_grid((payload['low'], payload['high']), payload['width'])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Grid) and self.shape == other.shape
            and np.array_equal(self.low, other.low) and np.array_equal(self.high, other.high)
        )

    def __hash__(self) -> int:
        return hash((self.shape, tuple(self.low), tuple(self.high)))


def make_grid(region: Sequence, width: float, max_cells: int = DEFAULT_MAX_CELLS) -> Grid:
    """
    Divide a box into cells of edge length at most ``width``.

    Args:
        region: (low, high) corner sequences
        width: Target cell edge length (> 0)
        max_cells: Cap on the number of cells

    Returns:
        Grid with prod(ceil(extent_k / width)) cells
    """
    low = np.atleast_1d(np.asarray(region[0], dtype=float))
    high = np.atleast_1d(np.asarray(region[1], dtype=float))
    if not width > 0:
        raise InvalidParameter(f"Grid width must be positive, got {width}")
    if low.shape != high.shape or np.any(high <= low):
        raise InvalidParameter(f"Degenerate region [{low.tolist()}, {high.tolist()}]")
    shape = tuple(int(np.ceil(np.round((h - l) / width, 9))) for l, h in zip(low, high))
    n_cells = int(np.prod(shape))
    if n_cells > max_cells:
        raise TooManyCells(f"Grid would have {n_cells} cells (cap {max_cells})")
    return Grid(low=low, high=high, shape=shape, width=float(width))


@dataclass
class CellCounts:
    """
    Per-level cell counts c_{l,i} and level totals N_l.

    Attributes:
        counts: Integer array of shape (m, n_cells)
    """
    counts: np.ndarray

    @property
    def totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def m(self) -> int:
        return self.counts.shape[0]

    def level(self, l: int) -> np.ndarray:
        return self.counts[l]


def bin_counts(grid: Grid, dataset) -> CellCounts:
    """
    Count the dataset's inputs per cell and level.

    Args:
        grid: Grid over the input region
        dataset: Object with ``inputs`` (N, d), ``labels`` (N,) and ``m``

    Returns:
        CellCounts
    """
    counts = np.zeros((dataset.m, grid.n_cells), dtype=int)
    if len(dataset.labels):
        cells = grid.cell_index(dataset.inputs)
        np.add.at(counts, (dataset.labels, cells), 1)
    return CellCounts(counts)


__all__ = ['Grid', 'make_grid', 'CellCounts', 'bin_counts', 'DEFAULT_MAX_CELLS']
