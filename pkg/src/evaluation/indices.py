"""
Evaluation Indices
==================

Confidence-band fields and the two accuracy indices on a grid:

- Ind(c): mean squared error of the estimated probability vector over the
  cells whose confidence band falls in (c - 0.1, c]
- CredRatio(c): area fraction of those cells

Fields are piecewise constant and cells have equal area, so both integrals
reduce to cell sums.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from ..lgp import Grid, bin_counts
from ..utils.errors import InvalidParameter

BIN_CENTERS = np.round(np.arange(1, 11) / 10, 1)


def band_bins(band: np.ndarray) -> np.ndarray:
    """Bin index in 0..9 of each band value; band 0 belongs to the first bin."""
    band = np.asarray(band, dtype=float)
    # rounding keeps values like 0.3 (stored as 0.30000000000000004) in their own bin
    return np.clip(np.ceil(np.round(band * 10, 12)).astype(int) - 1, 0, 9)


def _bin_of(c: float) -> int:
    k = int(round(c * 10))
    if abs(c * 10 - k) > 1e-9 or not 1 <= k <= 10:
        raise InvalidParameter(f"c must be one of 0.1, 0.2, ..., 1.0, got {c}")
    return k - 1


@dataclass
class ModelFields:
    """
    Queried mean and confidence band of a model at every grid cell.

    Attributes:
        mean: (n_cells, m)
        band: (n_cells,)
    """
    mean: np.ndarray
    band: np.ndarray

    @classmethod
    def from_model(cls, model, grid: Grid, beta: float = 0.05) -> 'ModelFields':
        batch = model.query_many(grid.centers, beta)
        return cls(mean=batch.mean, band=batch.band)


def confidence_band_field(model, grid: Grid, beta: float = 0.05) -> np.ndarray:
    """Band value (1/m) sum_l (upper_l - lower_l) per cell."""
    return model.query_many(grid.centers, beta).band


def ind_index(fields: ModelFields, truth_pi: np.ndarray, c: float) -> Optional[float]:
    """
    Ind(c), or None when no cell falls into the bin.

    Args:
        fields: Model fields on the truth grid
        truth_pi: Truth probability vectors per cell, (n_cells, m)
        c: Upper edge of the band bin
    """
    truth_pi = np.asarray(truth_pi, dtype=float)
    if truth_pi.shape != fields.mean.shape:
        raise InvalidParameter(f"Truth field {truth_pi.shape} and model field {fields.mean.shape} differ")
    mask = band_bins(fields.band) == _bin_of(c)
    if not np.any(mask):
        return None
    error = np.sum((fields.mean[mask] - truth_pi[mask]) ** 2, axis=1)
    return float(error.sum() / mask.sum())


def cred_ratio(fields: ModelFields, c: float) -> float:
    """CredRatio(c): fraction of cells whose band falls into the bin."""
    return float(np.mean(band_bins(fields.band) == _bin_of(c)))


def no_sample_ratio(dataset, grid: Grid) -> float:
    """Fraction of grid cells without any data point."""
    occupied = bin_counts(grid, dataset).counts.sum(axis=0) > 0
    return float(1.0 - occupied.mean())


def index_table(fields: ModelFields, truth_pi: np.ndarray) -> pd.DataFrame:
    """Ind(c) and CredRatio(c) for every bin; absent Ind values are NaN."""
    rows = []
    for c in BIN_CENTERS:
        ind = ind_index(fields, truth_pi, c)
        rows.append({
            'c': float(c),
            'ind': np.nan if ind is None else ind,
            'cred_ratio': cred_ratio(fields, c),
        })
    return pd.DataFrame(rows)


__all__ = [
    'BIN_CENTERS', 'band_bins', 'ModelFields', 'confidence_band_field',
    'ind_index', 'cred_ratio', 'no_sample_ratio', 'index_table'
]
