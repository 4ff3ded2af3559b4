"""
Kernel Density Estimation
=========================

Gaussian product-kernel density estimates with per-dimension bandwidths.
Kernel sums are accumulated in log space so tiny bandwidths never underflow.
"""

from typing import Optional

import numpy as np
from scipy.special import logsumexp
from loguru import logger

from ..utils.errors import InvalidParameter

BANDWIDTH_FLOOR = 1e-3
_CHUNK_ELEMENTS = 2_000_000


def scott_bandwidth(points: np.ndarray) -> np.ndarray:
    """
    Scott's rule h_k = n^(-1/(d+4)) * std_k.

    Dimensions with zero spread (including a single point) fall back to
    ``BANDWIDTH_FLOOR`` with a warning.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n, d = points.shape
    if n == 0:
        raise InvalidParameter("Scott's rule needs at least one point")
    std = points.std(axis=0, ddof=1) if n > 1 else np.zeros(d)
    h = n ** (-1.0 / (d + 4)) * std
    degenerate = ~(h > 0)
    if np.any(degenerate):
        logger.warning(f"Degenerate bandwidth in dimensions {np.nonzero(degenerate)[0].tolist()}; using {BANDWIDTH_FLOOR}")
        h = np.where(degenerate, BANDWIDTH_FLOOR, h)
    return h


def log_kernel_sum(points: np.ndarray, queries: np.ndarray, bandwidth: np.ndarray) -> np.ndarray:
    """
    log sum_i K_h(q - p_i) for normalized Gaussian product kernels K_h.

    Args:
        points: Sample points of shape (n, d)
        queries: Query points of shape (q, d)
        bandwidth: Per-dimension bandwidth of shape (d,) or a scalar

    Returns:
        Array of shape (q,); -inf when there are no points
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    d = queries.shape[1]
    h = np.broadcast_to(np.asarray(bandwidth, dtype=float), (d,))
    if len(points) == 0:
        return np.full(len(queries), -np.inf)

    log_norm = -0.5 * d * np.log(2 * np.pi) - np.sum(np.log(h))
    scaled_points = points / h
    out = np.empty(len(queries))
    step = max(1, _CHUNK_ELEMENTS // len(points))
    for start in range(0, len(queries), step):
        q = queries[start:start + step] / h
        sq = np.sum((q[:, None, :] - scaled_points[None, :, :]) ** 2, axis=2)
        out[start:start + step] = logsumexp(-0.5 * sq, axis=1) + log_norm
    return out


def kde_density(points: np.ndarray, x: np.ndarray, bandwidth: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Gaussian product-kernel density estimate.

    Args:
        points: At least one sample point, shape (n, d)
        x: Query point (d,) or points (q, d)
        bandwidth: Per-dimension bandwidth (default: Scott's rule)

    Returns:
        Density at x (scalar for a single query point)
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) == 0:
        raise InvalidParameter("KDE needs at least one point")
    h = scott_bandwidth(points) if bandwidth is None else bandwidth
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    density = np.exp(log_kernel_sum(points, np.atleast_2d(x), h) - np.log(len(points)))
    return float(density[0]) if single else density


__all__ = ['scott_bandwidth', 'log_kernel_sum', 'kde_density', 'BANDWIDTH_FLOOR']
