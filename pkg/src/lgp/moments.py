"""
Density Moments
===============

Per-cell mean and standard deviation of the density exp(f_i) / (sum_k exp(f_k) * area)
under samples of the latent field.
"""

from typing import Tuple

import numpy as np

from ..numerics import Rng, sample_with_factor, softmax
from ..utils.errors import InvalidParameter

DEFAULT_DRAWS = 2000
_CHUNK = 500


def densities_from_fields(fields: np.ndarray, cell_area: float) -> np.ndarray:
    """Normalised cell densities for each row of latent field values."""
    return softmax(np.atleast_2d(fields), axis=1) / cell_area


def sample_moments(densities: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per-cell sample mean and standard deviation (ddof=1)."""
    if len(densities) < 2:
        raise InvalidParameter(f"Need at least 2 samples for moments, got {len(densities)}")
    return densities.mean(axis=0), densities.std(axis=0, ddof=1)


def density_moments(
    mode: np.ndarray,
    factor: np.ndarray,
    cell_area: float,
    draws: int = DEFAULT_DRAWS,
    rng: Rng = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Monte Carlo moments of the density field under N(mode, factor factor^T).

    Args:
        mode: Posterior mode over cells
        factor: Square-root factor of the posterior covariance
        cell_area: Area of one cell
        draws: Number of samples S (>= 2)
        rng: Random stream

    Returns:
        Tuple of (p_E, p_sigma), each of shape (n_cells,)
    """
    if draws < 2:
        raise InvalidParameter(f"Need at least 2 draws, got {draws}")
    mode = np.asarray(mode, dtype=float)
    if not np.any(factor):
        return densities_from_fields(mode, cell_area)[0], np.zeros_like(mode)

    rng = rng or Rng(0)
    chunks = []
    for start in range(0, draws, _CHUNK):
        n = min(_CHUNK, draws - start)
        chunks.append(densities_from_fields(sample_with_factor(mode, factor, n, rng), cell_area))
    return sample_moments(np.vstack(chunks))


__all__ = ['DEFAULT_DRAWS', 'densities_from_fields', 'sample_moments', 'density_moments']
