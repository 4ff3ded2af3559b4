"""
Inference Strategies
====================

Turn a fitted Laplace approximation into density moment fields. The default
samples the Gaussian approximation directly; MCMC backends sample the exact
posterior instead.
"""

from abc import ABC, abstractmethod
from typing import Tuple

import numpy as np

from ..numerics import Rng
from .laplace import LaplaceFit
from .moments import DEFAULT_DRAWS, density_moments


class InferenceStrategy(ABC):
    """Computes (p_E, p_sigma) for one level."""

    name: str = "base"

    @abstractmethod
    def moments(
        self,
        fit: LaplaceFit,
        K: np.ndarray,
        counts: np.ndarray,
        cell_area: float,
        rng: Rng
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Args:
            fit: Laplace fit of the level
            K: Prior covariance over cells
            counts: Cell counts of the level
            cell_area: Area of one cell
            rng: Random stream owned by this call

        Returns:
            Tuple of (p_E, p_sigma) per cell
        """
        pass


class LaplaceInference(InferenceStrategy):
    """Sample the Laplace approximation (deterministic given the seed)."""

    name = "laplace"

    def __init__(self, draws: int = DEFAULT_DRAWS):
        self.draws = draws

    def moments(self, fit, K, counts, cell_area, rng):
        return density_moments(fit.mode, fit.factor, cell_area, self.draws, rng)


__all__ = ['InferenceStrategy', 'LaplaceInference']
