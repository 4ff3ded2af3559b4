"""
Level Posterior
===============

Fit one level's logistic Gaussian process on a grid and keep the pieces the
Dirichlet field needs: the latent mode, a covariance factor, and the density
mean and standard-deviation fields.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
from loguru import logger

from ..numerics import Rng
from ..utils.errors import InvalidParameter
from .grid import Grid
from .hyper import HyperPrior, hyper_map
from .inference import InferenceStrategy, LaplaceInference
from .kernel import KernelParams, kernel_matrix
from .laplace import laplace_fit
from .metropolis import MetropolisInference
from .moments import DEFAULT_DRAWS

SCHEMA_VERSION = 1


@dataclass
class LgpConfig:
    """Settings of the per-level LGP fits."""
    grid_width: float = 0.5
    max_cells: int = 100_000
    draws: int = DEFAULT_DRAWS
    inference: str = "laplace"
    mcmc_steps: int = 100000
    amplitude_sd: float = 1.0
    inv_length_sd: float = 1.0
    search_bounds: Tuple[float, float] = (1e-2, 1e2)
    search_size: int = 15
    refine: bool = True
    fixed_params: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.inference not in ("laplace", "metropolis"):
            raise InvalidParameter(f"inference must be 'laplace' or 'metropolis', got {self.inference!r}")
        if self.draws < 2:
            raise InvalidParameter(f"draws must be >= 2, got {self.draws}")
        self.search_bounds = tuple(self.search_bounds)
        if self.fixed_params is not None:
            self.fixed_params = tuple(self.fixed_params)

    @property
    def hyper_prior(self) -> HyperPrior:
        return HyperPrior(self.amplitude_sd, self.inv_length_sd, self.search_bounds, self.search_size)

    def strategy(self) -> InferenceStrategy:
        if self.inference == "metropolis":
            return MetropolisInference(n_steps=self.mcmc_steps)
        return LaplaceInference(draws=self.draws)

    @classmethod
    def from_dict(cls, payload: Optional[Dict[str, Any]]) -> 'LgpConfig':
        payload = payload or {}
        return cls(**{k: v for k, v in payload.items() if k in cls.__dataclass_fields__})


@dataclass
class LgpPosterior:
    """
    Fitted posterior of one level.

    Attributes:
        params: Kernel hyper-parameters used for the fit
        mode: Latent mode f_hat per cell
        factor: Square-root factor of the posterior covariance (may be None
            after loading a compact artifact)
        p_mean: Density mean field p_E per cell
        p_std: Density standard-deviation field p_sigma per cell
        n_level: Number of samples N_l of the level
        log_marginal: Laplace log marginal likelihood at ``params``
        inference: Name of the strategy that produced the moments
    """
    params: KernelParams
    mode: np.ndarray
    factor: Optional[np.ndarray]
    p_mean: np.ndarray
    p_std: np.ndarray
    n_level: int
    log_marginal: float = 0.0
    inference: str = "laplace"
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self, include_factor: bool = True) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'params': self.params.to_dict(),
            'mode': self.mode,
            'factor': self.factor if include_factor and self.factor is not None else None,
            'p_mean': self.p_mean,
            'p_std': self.p_std,
            'n_level': int(self.n_level),
            'log_marginal': self.log_marginal,
            'inference': self.inference,
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> 'LgpPosterior':
        if payload.get('schema_version') != SCHEMA_VERSION:
            raise InvalidParameter(f"Unsupported posterior schema version {payload.get('schema_version')}")
        factor = payload.get('factor')
        return cls(
            params=KernelParams.from_dict(payload['params']),
            mode=np.asarray(payload['mode'], dtype=float),
            factor=None if factor is None else np.asarray(factor, dtype=float),
            p_mean=np.asarray(payload['p_mean'], dtype=float),
            p_std=np.asarray(payload['p_std'], dtype=float),
            n_level=int(payload['n_level']),
            log_marginal=float(payload.get('log_marginal', 0.0)),
            inference=payload.get('inference', 'laplace'),
        )


def fit_level(grid: Grid, counts: np.ndarray, config: LgpConfig, rng: Rng) -> LgpPosterior:
    """
    Fit one level: hyper-parameter MAP, Laplace fit, density moments.

    Args:
        grid: Grid over the input region
        counts: Cell counts c_l of the level
        config: LGP settings
        rng: Random stream owned by this level

    Returns:
        LgpPosterior
    """
    counts = np.asarray(counts)
    centers = grid.centers
    if config.fixed_params is not None:
        params = KernelParams(*config.fixed_params)
    else:
        params = hyper_map(centers, counts, config.hyper_prior, refine=config.refine)

    K = kernel_matrix(centers, params)
    fit = laplace_fit(K, counts)
    logger.debug(f"Laplace fit: {fit.iterations} Newton steps, gradient norm {fit.gradient_norm:.2e}")

    strategy = config.strategy()
    p_mean, p_std = strategy.moments(fit, K, counts, grid.cell_area, rng)
    return LgpPosterior(
        params=params,
        mode=fit.mode,
        factor=fit.factor,
        p_mean=p_mean,
        p_std=p_std,
        n_level=int(counts.sum()),
        log_marginal=fit.log_marginal,
        inference=strategy.name,
    )


__all__ = ['LgpConfig', 'LgpPosterior', 'fit_level', 'SCHEMA_VERSION']
