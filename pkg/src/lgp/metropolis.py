"""
Random-Walk Metropolis
======================

Samples the exact latent-field posterior p(f | c) ∝ p(c | f) N(f | 0, K).
The chain runs in the prior-whitened coordinates v = L_K^-1 f with
proposals shaped by the Laplace covariance.
"""

from typing import Optional

import numpy as np
from scipy.linalg import solve_triangular
from loguru import logger

from ..numerics import Rng, jittered_cholesky
from ..utils.errors import InvalidParameter
from .inference import InferenceStrategy
from .laplace import LaplaceFit, log_likelihood
from .moments import densities_from_fields, sample_moments


class MetropolisInference(InferenceStrategy):
    """
    Random-walk Metropolis preconditioned by the Laplace covariance.

    Args:
        n_steps: Chain length including burn-in
        burn_in: Discarded initial steps (default: 10% of the chain)
        thin: Keep every ``thin``-th state
        step_scale: Proposal scale (default 2.38 / sqrt(n_cells))

    Example:
        >>> strategy = MetropolisInference(n_steps=200000)
        >>> p_mean, p_std = strategy.moments(fit, K, counts, grid.cell_area, Rng(0))
    """

    name = "metropolis"

    def __init__(
        self,
        n_steps: int = 100000,
        burn_in: Optional[int] = None,
        thin: int = 10,
        step_scale: Optional[float] = None
    ):
        if n_steps < 2:
            raise InvalidParameter(f"n_steps must be >= 2, got {n_steps}")
        self.n_steps = n_steps
        self.burn_in = n_steps // 10 if burn_in is None else burn_in
        self.thin = max(1, thin)
        self.step_scale = step_scale
        self.acceptance_rate = None

    def sample(self, fit: LaplaceFit, K: np.ndarray, counts: np.ndarray, rng: Rng) -> np.ndarray:
        """Run the chain and return the kept latent fields (n_kept, n_cells)."""
        counts = np.asarray(counts, dtype=float)
        size = len(counts)
        L_K, _ = jittered_cholesky(K)
        proposal = solve_triangular(L_K, fit.factor, lower=True)
        scale = self.step_scale or 2.38 / np.sqrt(size)

        def log_target(v):
            return log_likelihood(counts, L_K @ v)[0] - 0.5 * float(v @ v)

        v = solve_triangular(L_K, fit.mode, lower=True)
        current = log_target(v)
        gen = rng.generator
        kept = []
        accepted = 0
        block = 10000
        for start in range(0, self.n_steps, block):
            n = min(block, self.n_steps - start)
            steps = scale * gen.standard_normal((n, size)) @ proposal.T
            log_u = np.log(gen.random(n))
            for k in range(n):
                candidate = v + steps[k]
                value = log_target(candidate)
                if log_u[k] < value - current:
                    v, current = candidate, value
                    accepted += 1
                t = start + k
                if t >= self.burn_in and (t - self.burn_in) % self.thin == 0:
                    kept.append(L_K @ v)

        self.acceptance_rate = accepted / self.n_steps
        logger.info(f"Metropolis chain: {self.n_steps} steps, acceptance {self.acceptance_rate:.3f}, kept {len(kept)}")
        return np.array(kept)

    def moments(self, fit, K, counts, cell_area, rng):
        samples = self.sample(fit, K, counts, rng)
        return sample_moments(densities_from_fields(samples, cell_area))


__all__ = ['MetropolisInference']
