"""
GDP Baseline
============

Gaussian-process Dirichlet classification. Each one-hot label is smoothed
to a = onehot + alpha_eps and the Dirichlet at every training input is
moment-matched by m independent log-normals:

    v = log(1 / a + 1),    y = log a - v / 2

One GP regressor per level is fitted to y with per-point noise variance v.
Queries push S latent samples through exp-and-normalise and summarise them
empirically.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.gaussian_process import GaussianProcessRegressor
from sklearn.gaussian_process.kernels import RBF, ConstantKernel
from loguru import logger

from ..dirichlet import QueryBatch, QueryResult
from ..numerics import Rng, softmax
from ..utils.errors import InvalidParameter, NotFittedError
from ..utils.helpers import max_workers

SCHEMA_VERSION = 1
_KERNEL_BOUNDS = (1e-6, 1e6)
_QUERY_CHUNK = 500


@dataclass
class GdpConfig:
    """GDP settings."""
    alpha_eps: float = 0.01
    draws: int = 2000
    search_bounds: Tuple[float, float] = (1e-2, 1e2)
    search_size: int = 15
    seed: int = 0

    def __post_init__(self):
        if not self.alpha_eps > 0:
            raise InvalidParameter(f"alpha_eps must be positive, got {self.alpha_eps}")
        if self.draws < 2:
            raise InvalidParameter(f"draws must be >= 2, got {self.draws}")
        self.search_bounds = tuple(self.search_bounds)

    @classmethod
    def from_dict(cls, payload: Optional[Dict[str, Any]]) -> 'GdpConfig':
        payload = payload or {}
        return cls(**{k: v for k, v in payload.items() if k in cls.__dataclass_fields__})


def moment_matched_targets(labels: np.ndarray, m: int, alpha_eps: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Log-normal targets and noise variances.

    Returns:
        Tuple of (y, v), each of shape (N, m)
    """
    a = np.eye(m)[np.asarray(labels, dtype=int)] + alpha_eps
    v = np.log(1.0 / a + 1.0)
    return np.log(a) - v / 2, v


def _make_kernel(amplitude: float, inv_length: float):
    length = 1.0 / np.sqrt(2.0 * inv_length)
    return (
        ConstantKernel(amplitude, constant_value_bounds=_KERNEL_BOUNDS)
        * RBF(length_scale=length, length_scale_bounds=_KERNEL_BOUNDS)
    )


def _regressor(X: np.ndarray, y: np.ndarray, noise: np.ndarray, params: Tuple[float, float]) -> GaussianProcessRegressor:
    gpr = GaussianProcessRegressor(kernel=_make_kernel(*params), alpha=noise, optimizer=None, normalize_y=False)
    return gpr.fit(X, y)


def select_params(X: np.ndarray, y: np.ndarray, noise: np.ndarray, config: GdpConfig) -> Tuple[float, float]:
    """Maximise the log marginal likelihood over the log-spaced search grid."""
    axis = np.logspace(*np.log10(config.search_bounds), config.search_size)
    gpr = _regressor(X, y, noise, (1.0, 1.0))
    best, best_score = (float(axis[0]), float(axis[0])), -np.inf
    for amplitude in axis:
        for inv_length in axis:
            theta = _make_kernel(amplitude, inv_length).theta
            try:
                score = gpr.log_marginal_likelihood(theta)
            except np.linalg.LinAlgError:
                continue
            if np.isfinite(score) and score > best_score:
                best, best_score = (float(amplitude), float(inv_length)), float(score)
    return best


@dataclass
class GdpModel:
    """
    Fitted GDP model.

    The regressors are rebuilt from the stored training data and
    hyper-parameters, so the artifact stays small and exact.
    """
    levels: Sequence[float]
    inputs: np.ndarray
    labels: np.ndarray
    params: List[Tuple[float, float]]
    config: GdpConfig = field(default_factory=GdpConfig)
    metadata: Dict[str, Any] = field(default_factory=dict)
    _regressors: Optional[List[GaussianProcessRegressor]] = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return len(self.params)

    @property
    def method(self) -> str:
        return "gdp"

    def _fit_regressors(self) -> List[GaussianProcessRegressor]:
        if self._regressors is None:
            y, v = moment_matched_targets(self.labels, self.m, self.config.alpha_eps)
            self._regressors = [
                _regressor(self.inputs, y[:, l], v[:, l], self.params[l]) for l in range(self.m)
            ]
        return self._regressors

    def latent_moments(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Predictive mean and standard deviation of the latent values, each (n, m)."""
        if len(self.labels) == 0:
            raise NotFittedError("Model not fitted. Call fit() first.")
        x = np.atleast_2d(np.asarray(x, dtype=float))
        means, stds = zip(*(gpr.predict(x, return_std=True) for gpr in self._fit_regressors()))
        return np.column_stack(means), np.column_stack(stds)

    def query(self, x: np.ndarray, beta: float = 0.05) -> QueryResult:
        return self.query_many(np.atleast_2d(x), beta)[0]

    def query_many(self, x: np.ndarray, beta: float = 0.05) -> QueryBatch:
        """
        Empirical mean, covariance and equal-tail bounds of softmax(latent).

        Draws come from a fresh stream derived from the model seed, so the
        same inputs always give the same answer.
        """
        if not 0 < beta < 1:
            raise InvalidParameter(f"Tail mass beta must lie in (0, 1), got {beta}")
        x = np.atleast_2d(np.asarray(x, dtype=float))
        mu, sd = self.latent_moments(x)
        gen = Rng(self.config.seed).derive("gdp-query").generator

        n, m = mu.shape
        mean = np.empty((n, m))
        cov = np.empty((n, m, m))
        lower = np.empty((n, m))
        upper = np.empty((n, m))
        for start in range(0, n, _QUERY_CHUNK):
            sl = slice(start, start + _QUERY_CHUNK)
            z = gen.standard_normal((self.config.draws,) + mu[sl].shape)
            probs = softmax(mu[sl] + sd[sl] * z, axis=2)
            mean[sl] = probs.mean(axis=0)
            centred = probs - mean[sl]
            cov[sl] = np.einsum('sni,snj->nij', centred, centred) / (self.config.draws - 1)
            lower[sl], upper[sl] = np.quantile(probs, [beta / 2, 1 - beta / 2], axis=0)
        return QueryBatch(mean=mean, cov=cov, lower=lower, upper=upper, band=np.mean(upper - lower, axis=1))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'method': self.method,
            'levels': list(self.levels),
            'inputs': self.inputs,
            'labels': self.labels,
            'params': [list(p) for p in self.params],
            'config': {
                'alpha_eps': self.config.alpha_eps,
                'draws': self.config.draws,
                'search_bounds': list(self.config.search_bounds),
                'search_size': self.config.search_size,
                'seed': self.config.seed,
            },
            'metadata': self.metadata,
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> 'GdpModel':
        if payload.get('schema_version') != SCHEMA_VERSION:
            raise InvalidParameter(f"Unsupported model schema version {payload.get('schema_version')}")
        inputs = np.asarray(payload['inputs'], dtype=float)
        return cls(
            levels=payload['levels'],
            inputs=inputs.reshape(len(payload['labels']), -1),
            labels=np.asarray(payload['labels'], dtype=int),
            params=[tuple(p) for p in payload['params']],
            config=GdpConfig.from_dict(payload['config']),
            metadata=payload.get('metadata', {}),
        )


def gdp_fit(dataset, levels, config: Optional[GdpConfig] = None) -> GdpModel:
    """
    Fit the GDP baseline.

    Args:
        dataset: Labeled dataset (at least one sample)
        levels: RobustnessLevels of the labels
        config: GDP settings

    Returns:
        GdpModel
    """
    config = config or GdpConfig()
    if len(dataset.labels) == 0:
        raise InvalidParameter("GDP needs at least one sample")
    m = levels.m
    y, v = moment_matched_targets(dataset.labels, m, config.alpha_eps)

    with ThreadPoolExecutor(max_workers=min(m, max_workers())) as executor:
        futures = [executor.submit(select_params, dataset.inputs, y[:, l], v[:, l], config) for l in range(m)]
        params = [future.result() for future in futures]

    for l, (amplitude, inv_length) in enumerate(params):
        logger.info(f"GDP level {l}: theta = ({amplitude:.4g}, {inv_length:.4g})")
    model = GdpModel(
        levels=levels.to_list(),
        inputs=np.asarray(dataset.inputs, dtype=float),
        labels=np.asarray(dataset.labels, dtype=int),
        params=params,
        config=config,
    )
    model._fit_regressors()
    return model


__all__ = ['GdpConfig', 'moment_matched_targets', 'select_params', 'GdpModel', 'gdp_fit']
