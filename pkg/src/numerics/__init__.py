"""
Numerics Module
===============

Deterministic numerical kernel shared by every other module.
"""

from .rng import Rng, as_rng
from .linalg import cholesky, jittered_cholesky, psd_factor, mvn_sample, sample_with_factor
from .special import beta_quantile, beta_quantiles, logsumexp, softmax
from .optimize import maximize_1d

__all__ = [
    'Rng', 'as_rng', 'cholesky', 'jittered_cholesky', 'psd_factor', 'mvn_sample', 'sample_with_factor',
    'beta_quantile', 'beta_quantiles', 'logsumexp', 'softmax', 'maximize_1d'
]
