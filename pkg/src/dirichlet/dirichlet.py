"""
Dirichlet Distribution
======================

Moments, marginal equal-tail credible bounds and sampling of Dir(alpha), and
the batched query used by every model in the package.

Marginal conventions: when alpha_l = 0 the marginal is a point mass at 0 and
the bounds are (0, 0); when alpha_l = alpha_0 it is a point mass at 1 and the
bounds are (1, 1).
"""

from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
from loguru import logger

from ..numerics import Rng, beta_quantile, beta_quantiles
from ..utils.errors import AllZero, InvalidParameter, NonPositiveAlpha


def _check_alpha(alpha: np.ndarray) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    if not np.all(np.isfinite(alpha)) or np.any(alpha < 0):
        raise InvalidParameter("Dirichlet parameters must be finite and non-negative")
    if np.any(alpha.sum(axis=-1) <= 0):
        raise AllZero("Dirichlet parameters sum to zero")
    return alpha


def _check_beta(beta: float) -> None:
    if not 0 < beta < 1:
        raise InvalidParameter(f"Tail mass beta must lie in (0, 1), got {beta}")


def dir_mean(alpha: np.ndarray) -> np.ndarray:
    """
    Mean alpha / alpha_0.

    Example:
        >>> dir_mean([2, 1, 1])
        array([0.5 , 0.25, 0.25])
    """
    alpha = _check_alpha(alpha)
    return alpha / alpha.sum(axis=-1, keepdims=True)


def dir_cov(alpha: np.ndarray) -> np.ndarray:
    """Covariance (alpha_0 diag(alpha) - alpha alpha^T) / (alpha_0^2 (alpha_0 + 1))."""
    alpha = _check_alpha(alpha)
    a0 = alpha.sum(axis=-1)[..., None, None]
    outer = alpha[..., :, None] * alpha[..., None, :]
    diag = alpha[..., :, None] * np.eye(alpha.shape[-1]) * a0
    return (diag - outer) / (a0 ** 2 * (a0 + 1.0))


def marginal_credible(alpha: np.ndarray, l: int, beta: float) -> Tuple[float, float]:
    """
    Equal-tail credible interval of component l.

    The marginal is Beta(alpha_l, alpha_0 - alpha_l); the bounds are its
    beta/2 and 1 - beta/2 quantiles.

    Args:
        alpha: Dirichlet parameters
        l: 0-based component index
        beta: Total tail mass in (0, 1)

    Returns:
        Tuple of (lower, upper)
    """
    alpha = _check_alpha(alpha)
    _check_beta(beta)
    a = float(alpha[l])
    b = float(alpha.sum() - a)
    if a == 0:
        logger.warning(f"Component {l} has zero weight; credible bounds are (0, 0)")
        return 0.0, 0.0
    if b == 0:
        logger.warning(f"Component {l} carries all weight; credible bounds are (1, 1)")
        return 1.0, 1.0
    return beta_quantile(a, b, beta / 2), beta_quantile(a, b, 1 - beta / 2)


def dir_sample(alpha: np.ndarray, n: int, rng: Rng) -> np.ndarray:
    """Draw n probability vectors as normalised Gamma(alpha_l, 1) variates."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any(~(alpha > 0)):
        raise NonPositiveAlpha(f"Sampling needs strictly positive parameters, got {alpha.tolist()}")
    g = rng.generator.standard_gamma(alpha, size=(n, len(alpha)))
    return g / g.sum(axis=1, keepdims=True)


@dataclass
class QueryResult:
    """Answer for a single input."""
    mean: np.ndarray
    cov: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    band: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mean': self.mean.tolist(),
            'cov': self.cov.tolist(),
            'lower': self.lower.tolist(),
            'upper': self.upper.tolist(),
            'band': float(self.band),
        }


@dataclass
class QueryBatch:
    """
    Answers for many inputs.

    Attributes:
        mean: (n, m)
        cov: (n, m, m)
        lower: (n, m)
        upper: (n, m)
        band: (n,) average credible width (1/m) sum_l (upper_l - lower_l)
    """
    mean: np.ndarray
    cov: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    band: np.ndarray

    def __len__(self) -> int:
        return len(self.band)

    def __getitem__(self, i: int) -> QueryResult:
        return QueryResult(self.mean[i], self.cov[i], self.lower[i], self.upper[i], float(self.band[i]))


def credible_bounds(alpha: np.ndarray, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised marginal bounds for an (n, m) parameter array."""
    alpha = _check_alpha(np.atleast_2d(alpha))
    _check_beta(beta)
    a = alpha
    b = alpha.sum(axis=1, keepdims=True) - alpha
    lower = np.zeros_like(a)
    upper = np.zeros_like(a)
    regular = (a > 0) & (b > 0)
    lower[regular] = beta_quantiles(a[regular], b[regular], beta / 2)
    upper[regular] = beta_quantiles(a[regular], b[regular], 1 - beta / 2)
    full = (a > 0) & (b <= 0)
    lower[full] = 1.0
    upper[full] = 1.0
    degenerate = int(np.sum(~regular))
    if degenerate:
        logger.warning(f"{degenerate} degenerate marginals; using point-mass bounds")
    return lower, upper


def dirichlet_query(alpha: np.ndarray, beta: float = 0.05) -> QueryBatch:
    """
    Mean, covariance, credible bounds and confidence band for each row of alpha.

    Args:
        alpha: Dirichlet parameters of shape (n, m) or (m,)
        beta: Total tail mass of the equal-tail intervals

    Returns:
        QueryBatch
    """
    alpha = _check_alpha(np.atleast_2d(alpha))
    lower, upper = credible_bounds(alpha, beta)
    band = np.mean(upper - lower, axis=1)
    return QueryBatch(
        mean=dir_mean(alpha),
        cov=dir_cov(alpha),
        lower=lower,
        upper=upper,
        band=band,
    )


__all__ = [
    'dir_mean', 'dir_cov', 'marginal_credible', 'dir_sample', 'credible_bounds',
    'QueryResult', 'QueryBatch', 'dirichlet_query'
]
