"""
Linear Algebra
==============

Cholesky factorization with a jitter ladder and multivariate normal sampling.
"""

from typing import Tuple

import numpy as np
from scipy.linalg import cholesky as _scipy_cholesky, eigh, LinAlgError
from loguru import logger

from ..utils.errors import InvalidParameter, NotPositiveDefinite
from .rng import Rng

JITTER_LADDER = (0.0, 1e-10, 1e-8, 1e-6)


def _check_symmetric(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidParameter(f"Expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidParameter("Matrix has non-finite entries")
    scale = max(np.max(np.abs(A)), 1.0) if A.size else 1.0
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-12 * scale:
        raise InvalidParameter("Matrix is not symmetric")
    return A


def cholesky(A: np.ndarray) -> np.ndarray:
    """
    Lower-triangular Cholesky factor of a symmetric matrix.

    Args:
        A: Symmetric, finite n x n matrix

    Returns:
        L with L @ L.T == A

    Raises:
        NotPositiveDefinite: If a pivot is not positive
    """
    A = _check_symmetric(A)
    try:
        return _scipy_cholesky(A, lower=True, check_finite=False)
    except LinAlgError as e:
        raise NotPositiveDefinite(str(e)) from e


def jittered_cholesky(A: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Cholesky factor retrying with additive diagonal jitter.

    Tries jitter 0, 1e-10, 1e-8 and 1e-6 times trace(A)/n.

    Returns:
        Tuple of (factor, jitter actually added)
    """
    A = _check_symmetric(A)
    n = A.shape[0]
    scale = np.trace(A) / n if n else 0.0
    last_error = None
    for level in JITTER_LADDER:
        jitter = level * scale
        try:
            L = _scipy_cholesky(A + jitter * np.eye(n), lower=True, check_finite=False)
        except LinAlgError as e:
            last_error = e
            continue
        if jitter > 0:
            logger.debug(f"Cholesky needed jitter {jitter:.3e}")
        return L, jitter
    raise NotPositiveDefinite(f"Cholesky failed after jitter ladder: {last_error}")


def mvn_sample(mean: np.ndarray, cov: np.ndarray, n: int, rng: Rng) -> np.ndarray:
    """
    Draw samples mean + L z with z standard normal.

    Args:
        mean: Mean vector of length d
        cov: d x d covariance
        n: Number of samples
        rng: Random stream

    Returns:
        Array of shape (n, d)
    """
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (mean.size, mean.size):
        raise InvalidParameter(f"Mean of length {mean.size} does not match covariance {cov.shape}")
    if not np.any(cov):
        return np.tile(mean, (n, 1))
    L, _ = jittered_cholesky(cov)
    return sample_with_factor(mean, L, n, rng)


def sample_with_factor(mean: np.ndarray, factor: np.ndarray, n: int, rng: Rng) -> np.ndarray:
    """Draw samples mean + factor z for a precomputed covariance factor."""
    z = rng.generator.standard_normal((n, mean.size))
    return mean[None, :] + z @ factor.T


def psd_factor(A: np.ndarray) -> np.ndarray:
    """
    Square-root factor F with F @ F.T ~= A for a positive semi-definite matrix.

    Tries the jittered Cholesky first and falls back to an eigendecomposition
    with negative eigenvalues clipped to zero.
    """
    A = 0.5 * (np.asarray(A, dtype=float) + np.asarray(A, dtype=float).T)
    try:
        L, _ = jittered_cholesky(A)
        return L
    except NotPositiveDefinite:
        logger.warning("Covariance is numerically singular; using a clipped eigen factor")
    eigvals, eigvecs = eigh(A)
    return eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))


__all__ = ['cholesky', 'jittered_cholesky', 'psd_factor', 'mvn_sample', 'sample_with_factor', 'JITTER_LADDER']
