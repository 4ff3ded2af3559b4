"""
DLGP Model
==========

Dirichlet random field assembled from per-level LGP posteriors.

For every grid cell and level the conservative pseudo-count is

    alpha_l(x; lambda) = max(N_l (p_E(x|l) - lambda p_sigma(x|l)), 0)

and the Dirichlet parameters are alpha_l(x; lambda) + alpha_prior_l.
Fields are piecewise constant: an input reads the values of its cell.
"""

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from scipy.stats import gamma
from loguru import logger

from ..dirichlet import QueryBatch, QueryResult, dirichlet_query
from ..lgp import Grid, LgpPosterior
from ..utils.errors import InvalidParameter
from .levels import RobustnessLevels

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class LambdaPrior:
    """
    Gamma prior on the conservativeness parameter.

    The default (shape 3, scale 1) has mode 2 and variance 3.
    """
    shape: float = 3.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.shape > 1:
            raise InvalidParameter(f"Gamma shape must exceed 1 for a mode to exist, got {self.shape}")
        if not self.scale > 0:
            raise InvalidParameter(f"Gamma scale must be positive, got {self.scale}")

    @classmethod
    def from_mode_variance(cls, mode: float, variance: float) -> 'LambdaPrior':
        scale = (-mode + np.sqrt(mode ** 2 + 4 * variance)) / 2
        return cls(shape=mode / scale + 1, scale=scale)

    @property
    def mode(self) -> float:
        return (self.shape - 1) * self.scale

    @property
    def variance(self) -> float:
        return self.shape * self.scale ** 2

    def log_pdf(self, lam: float) -> float:
        return float(gamma.logpdf(lam, a=self.shape, scale=self.scale))

    def to_dict(self) -> Dict[str, float]:
        return {'shape': self.shape, 'scale': self.scale}


@dataclass
class DlgpModel:
    """
    Fitted DLGP estimator.

    Attributes:
        levels: Robustness levels the model was fitted for
        grid: Grid the LGP fields live on
        posteriors: One LgpPosterior per level
        alpha_prior: Prior Dirichlet parameters (m,)
        lam: Conservativeness parameter used by queries
        lambda_prior: Gamma prior used to optimise ``lam``

    Example:
        >>> model = fit(dataset, levels, region, DlgpConfig())
        >>> result = model.query(np.array([3.5, 7.0]), beta=0.05)
        >>> result.mean, result.band
    """
    levels: RobustnessLevels
    grid: Grid
    posteriors: List[LgpPosterior]
    alpha_prior: np.ndarray
    lam: float = 0.0
    lambda_prior: LambdaPrior = field(default_factory=LambdaPrior)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.alpha_prior = np.asarray(self.alpha_prior, dtype=float)
        if len(self.posteriors) != self.levels.m or self.alpha_prior.shape != (self.levels.m,):
            raise InvalidParameter(f"Model needs {self.levels.m} posteriors and prior weights")
        if np.any(self.alpha_prior < 0):
            raise InvalidParameter("alpha_prior must be non-negative")
        if self.lam < 0:
            raise InvalidParameter(f"lambda must be non-negative, got {self.lam}")

    @property
    def m(self) -> int:
        return self.levels.m

    @property
    def method(self) -> str:
        return "dlgp"

    @property
    def n_levels(self) -> np.ndarray:
        return np.array([post.n_level for post in self.posteriors], dtype=float)

    @property
    def p_mean(self) -> np.ndarray:
        """Density mean fields, shape (m, n_cells)."""
        return np.vstack([post.p_mean for post in self.posteriors])

    @property
    def p_std(self) -> np.ndarray:
        return np.vstack([post.p_std for post in self.posteriors])

    def _lam(self, lam: Optional[float]) -> float:
        lam = self.lam if lam is None else float(lam)
        if lam < 0:
            raise InvalidParameter(f"lambda must be non-negative, got {lam}")
        return lam

    def pseudo_count_field(self, lam: Optional[float] = None) -> np.ndarray:
        """Conservative pseudo-counts per cell, shape (n_cells, m)."""
        lam = self._lam(lam)
        field_ = self.n_levels[:, None] * (self.p_mean - lam * self.p_std)
        return np.maximum(field_, 0.0).T

    def posterior_field(self, lam: Optional[float] = None) -> np.ndarray:
        """Dirichlet parameters per cell, shape (n_cells, m)."""
        return self.pseudo_count_field(lam) + self.alpha_prior

    def pseudo_count(self, x: np.ndarray, lam: Optional[float] = None, l: int = 0) -> float:
        """Pseudo-count of level l at input x."""
        cell = self.grid.cell_index(x)[0]
        return float(self.pseudo_count_field(lam)[cell, l])

    def posterior_params(self, x: np.ndarray, lam: Optional[float] = None) -> np.ndarray:
        """Dirichlet parameters at one input (m,) or many inputs (n, m)."""
        x = np.asarray(x, dtype=float)
        alpha = self.posterior_field(lam)[self.grid.cell_index(x)]
        return alpha[0] if x.ndim == 1 else alpha

    def lambda_objective(self, dataset, lam: float) -> float:
        """
        Log posterior of lambda given the labeled data.

        sum_i log(alpha_post,l_i(x_i) / sum_j alpha_post,j(x_i)) + log q(lambda)
        """
        lam = self._lam(lam)
        log_prior = self.lambda_prior.log_pdf(lam)
        if len(dataset.labels) == 0:
            return log_prior
        alpha = self.posterior_field(lam)[self.grid.cell_index(dataset.inputs)]
        chosen = alpha[np.arange(len(alpha)), dataset.labels]
        with np.errstate(divide='ignore'):
            log_lik = np.sum(np.log(chosen) - np.log(alpha.sum(axis=1)))
        return float(log_lik + log_prior)

    def query(self, x: np.ndarray, beta: float = 0.05) -> QueryResult:
        """Mean, covariance, per-level bounds and band at one input."""
        return self.query_many(np.atleast_2d(x), beta)[0]

    def query_many(self, x: np.ndarray, beta: float = 0.05) -> QueryBatch:
        return dirichlet_query(self.posterior_params(np.atleast_2d(x)), beta)

    def with_lambda(self, lam: float) -> 'DlgpModel':
        """Same fitted fields, different conservativeness."""
        return dataclasses.replace(self, lam=float(lam), metadata=dict(self.metadata))

    def to_dict(self, include_factor: bool = False) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'method': self.method,
            'levels': self.levels.to_list(),
            'grid': self.grid.to_dict(),
            'alpha_prior': self.alpha_prior,
            'lambda': self.lam,
            'lambda_prior': self.lambda_prior.to_dict(),
            'posteriors': [post.to_dict(include_factor) for post in self.posteriors],
            'metadata': self.metadata,
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> 'DlgpModel':
        if payload.get('schema_version') != SCHEMA_VERSION:
            raise InvalidParameter(f"Unsupported model schema version {payload.get('schema_version')}")
        model = cls(
            levels=RobustnessLevels.parse(payload['levels']),
            grid=Grid.from_dict(payload['grid']),
            posteriors=[LgpPosterior.from_dict(p) for p in payload['posteriors']],
            alpha_prior=np.asarray(payload['alpha_prior'], dtype=float),
            lam=float(payload['lambda']),
            lambda_prior=LambdaPrior(**payload.get('lambda_prior', {})),
            metadata=payload.get('metadata', {}),
        )
        logger.debug(f"Loaded DLGP model with lambda = {model.lam:.4f}")
        return model


__all__ = ['LambdaPrior', 'DlgpModel', 'SCHEMA_VERSION']
