"""
Special Functions
=================

Beta quantiles (inverse regularized incomplete beta) and the softmax family.
"""

import numpy as np
from scipy import special
from scipy.optimize import brentq

from ..utils.errors import InvalidParameter

QUANTILE_TOL = 1e-10


def beta_quantile(a: float, b: float, p: float) -> float:
    """
    Quantile of Beta(a, b): x with I_x(a, b) = p.

    Uses ``scipy.special.betaincinv`` and falls back to bracketed root
    finding on the monotone CDF when the residual exceeds 1e-10.

    Args:
        a: First shape parameter (> 0)
        b: Second shape parameter (> 0)
        p: Probability in (0, 1)

    Returns:
        Quantile in [0, 1]
    """
    if not (a > 0 and b > 0) or not np.isfinite(a) or not np.isfinite(b):
        raise InvalidParameter(f"Beta shapes must be positive, got a={a}, b={b}")
    if not 0 < p < 1:
        raise InvalidParameter(f"Probability must lie in (0, 1), got {p}")

    x = float(special.betaincinv(a, b, p))
    if np.isfinite(x) and abs(special.betainc(a, b, x) - p) <= QUANTILE_TOL:
        return x
    return float(brentq(lambda t: special.betainc(a, b, t) - p, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500))


def beta_quantiles(a: np.ndarray, b: np.ndarray, p: float) -> np.ndarray:
    """Vectorised ``beta_quantile`` over broadcastable shape arrays."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if not 0 < p < 1:
        raise InvalidParameter(f"Probability must lie in (0, 1), got {p}")
    if np.any(a <= 0) or np.any(b <= 0):
        raise InvalidParameter("Beta shapes must be positive")
    x = special.betaincinv(a, b, p)
    bad = ~np.isfinite(x) | (np.abs(special.betainc(a, b, np.nan_to_num(x)) - p) > QUANTILE_TOL)
    for idx in zip(*np.nonzero(bad)):
        x[idx] = beta_quantile(a[idx], b[idx], p)
    return x


def logsumexp(f: np.ndarray, axis: int = -1) -> np.ndarray:
    """Max-shifted log-sum-exp."""
    return special.logsumexp(f, axis=axis)


def softmax(f: np.ndarray, axis: int = -1) -> np.ndarray:
    """Max-shifted softmax."""
    return special.softmax(f, axis=axis)


__all__ = ['beta_quantile', 'beta_quantiles', 'logsumexp', 'softmax']
