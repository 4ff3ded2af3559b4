"""
DLGP Estimator
==============

Fit the DLGP model from a labeled dataset:

1. bin the inputs of every level on the grid
2. fit one LGP posterior per level (in parallel)
3. choose lambda by maximising its posterior on [0, lambda_max]
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
from loguru import logger

from ..lgp import LgpConfig, bin_counts, fit_level, make_grid
from ..numerics import Rng, maximize_1d
from ..utils.errors import InvalidParameter
from ..utils.helpers import max_workers
from .levels import RobustnessLevels
from .model import DlgpModel, LambdaPrior


@dataclass
class DlgpConfig:
    """
    Settings of a DLGP fit.

    Attributes:
        lgp: Per-level LGP settings (grid width, hyper-prior, draws, ...)
        alpha_prior: Prior Dirichlet parameters (default 1/m each)
        lam: "opt" to optimise lambda, or a fixed value
        lambda_max: Upper end of the lambda search interval
        lambda_shape: Gamma prior shape
        lambda_scale: Gamma prior scale
        seed: Seed of the moment draws
    """
    lgp: LgpConfig = field(default_factory=LgpConfig)
    alpha_prior: Optional[Sequence[float]] = None
    lam: Union[str, float] = "opt"
    lambda_max: float = 10.0
    lambda_shape: float = 3.0
    lambda_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.lam, str) and self.lam != "opt":
            self.lam = float(self.lam)
        if not isinstance(self.lam, str) and self.lam < 0:
            raise InvalidParameter(f"lambda must be non-negative, got {self.lam}")
        if not self.lambda_max > 0:
            raise InvalidParameter(f"lambda_max must be positive, got {self.lambda_max}")

    @property
    def lambda_prior(self) -> LambdaPrior:
        return LambdaPrior(self.lambda_shape, self.lambda_scale)

    def prior_weights(self, m: int) -> np.ndarray:
        if self.alpha_prior is None:
            return np.full(m, 1.0 / m)
        weights = np.asarray(self.alpha_prior, dtype=float)
        if weights.shape != (m,):
            raise InvalidParameter(f"alpha_prior needs {m} entries, got {weights.shape}")
        return weights

    @classmethod
    def from_dict(cls, payload: Optional[Dict[str, Any]], lgp: Optional[Dict[str, Any]] = None) -> 'DlgpConfig':
        payload = dict(payload or {})
        payload.pop('lgp', None)
        known = {k: v for k, v in payload.items() if k in cls.__dataclass_fields__}
        return cls(lgp=LgpConfig.from_dict(lgp), **known)


def optimize_lambda(model: DlgpModel, dataset, lambda_max: float = 10.0) -> float:
    """lambda* maximising ``model.lambda_objective`` on [0, lambda_max]."""
    return maximize_1d(lambda lam: model.lambda_objective(dataset, lam), 0.0, lambda_max)


def fit(dataset, levels: RobustnessLevels, region: Sequence, config: Optional[DlgpConfig] = None) -> DlgpModel:
    """
    Fit the DLGP model.

    Args:
        dataset: Labeled dataset (``inputs``, ``labels``, ``m``)
        levels: Robustness levels the labels refer to
        region: (low, high) corners of the input region
        config: Fit settings

    Returns:
        DlgpModel with ``lam`` set to lambda* or the configured value
    """
    config = config or DlgpConfig()
    if dataset.m != levels.m:
        raise InvalidParameter(f"Dataset has {dataset.m} levels, expected {levels.m}")

    grid = make_grid(region, config.lgp.grid_width, config.lgp.max_cells)
    counts = bin_counts(grid, dataset)
    logger.info(f"Fitting DLGP on {grid.n_cells} cells, level counts {counts.totals.tolist()}")

    for l, total in enumerate(counts.totals):
        if total == 0:
            logger.warning(f"EmptyLevel: level {l} has no samples; its pseudo-counts are identically 0")

    rngs = Rng(config.seed).derive("lgp").spawn(levels.m)
    with ThreadPoolExecutor(max_workers=min(levels.m, max_workers())) as executor:
        futures = [
            executor.submit(fit_level, grid, counts.level(l), config.lgp, rngs[l])
            for l in range(levels.m)
        ]
        posteriors = [future.result() for future in futures]

    model = DlgpModel(
        levels=levels,
        grid=grid,
        posteriors=posteriors,
        alpha_prior=config.prior_weights(levels.m),
        lam=0.0,
        lambda_prior=config.lambda_prior,
        metadata={'n_samples': len(dataset.labels), 'seed': config.seed},
    )

    if config.lam == "opt":
        lam = optimize_lambda(model, dataset, config.lambda_max)
        logger.info(f"Optimised lambda* = {lam:.4f}")
    else:
        lam = float(config.lam)
        logger.info(f"Using fixed lambda = {lam:.4f}")
    return model.with_lambda(lam)


__all__ = ['DlgpConfig', 'optimize_lambda', 'fit']
