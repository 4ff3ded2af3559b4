"""
DKDE Baseline
=============

Dirichlet field with plug-in pseudo-counts alpha_l(x) = N_l kde_l(x), one
Gaussian KDE (Scott's rule) per level, plus alpha_prior. No conservativeness
term.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from loguru import logger

from ..dirichlet import QueryBatch, QueryResult, dirichlet_query
from ..utils.errors import InvalidParameter
from .kde import log_kernel_sum, scott_bandwidth

SCHEMA_VERSION = 1


@dataclass
class KdeModel:
    """
    Per-level KDE pseudo-count model.

    Attributes:
        levels: Level boundaries
        points: Inputs of each level
        bandwidths: Per-dimension bandwidth of each level (None when empty)
        alpha_prior: Prior Dirichlet parameters
    """
    levels: Sequence[float]
    points: List[np.ndarray]
    bandwidths: List[Optional[np.ndarray]]
    alpha_prior: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.points)

    @property
    def method(self) -> str:
        return "dkde"

    @property
    def n_levels(self) -> np.ndarray:
        return np.array([len(p) for p in self.points], dtype=float)

    def pseudo_counts(self, x: np.ndarray) -> np.ndarray:
        """N_l kde_l(x) for each input, shape (n, m)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.zeros((len(x), self.m))
        for l, (points, h) in enumerate(zip(self.points, self.bandwidths)):
            if len(points):
                # N_l * kde_l(x) is the plain kernel sum
                out[:, l] = np.exp(log_kernel_sum(points, x, h))
        return out

    def posterior_params(self, x: np.ndarray) -> np.ndarray:
        return self.pseudo_counts(x) + self.alpha_prior

    def query(self, x: np.ndarray, beta: float = 0.05) -> QueryResult:
        return self.query_many(np.atleast_2d(x), beta)[0]

    def query_many(self, x: np.ndarray, beta: float = 0.05) -> QueryBatch:
        return dirichlet_query(self.posterior_params(x), beta)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'method': self.method,
            'levels': list(self.levels),
            'points': [p.tolist() for p in self.points],
            'bandwidths': [None if h is None else h.tolist() for h in self.bandwidths],
            'alpha_prior': self.alpha_prior,
            'metadata': self.metadata,
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> 'KdeModel':
        if payload.get('schema_version') != SCHEMA_VERSION:
            raise InvalidParameter(f"Unsupported model schema version {payload.get('schema_version')}")
        dim = next((len(p[0]) for p in payload['points'] if len(p)), 2)
        return cls(
            levels=payload['levels'],
            points=[np.asarray(p, dtype=float).reshape(-1, dim) for p in payload['points']],
            bandwidths=[None if h is None else np.asarray(h, dtype=float) for h in payload['bandwidths']],
            alpha_prior=np.asarray(payload['alpha_prior'], dtype=float),
            metadata=payload.get('metadata', {}),
        )


def dkde_fit(dataset, levels, alpha_prior: Optional[Sequence[float]] = None) -> KdeModel:
    """
    Fit the DKDE baseline.

    Args:
        dataset: Labeled dataset
        levels: RobustnessLevels of the labels
        alpha_prior: Prior Dirichlet parameters (default 1/m each)

    Returns:
        KdeModel
    """
    m = levels.m
    prior = np.full(m, 1.0 / m) if alpha_prior is None else np.asarray(alpha_prior, dtype=float)
    if prior.shape != (m,):
        raise InvalidParameter(f"alpha_prior needs {m} entries, got {prior.shape}")

    points, bandwidths = [], []
    for l in range(m):
        subset = dataset.inputs[dataset.labels == l]
        points.append(subset)
        bandwidths.append(scott_bandwidth(subset) if len(subset) else None)
        if len(subset) == 0:
            logger.warning(f"Level {l} has no samples; its pseudo-counts are identically 0")

    logger.info(f"Fitted DKDE with level counts {[len(p) for p in points]}")
    return KdeModel(levels=levels.to_list(), points=points, bandwidths=bandwidths, alpha_prior=prior)


__all__ = ['KdeModel', 'dkde_fit']
