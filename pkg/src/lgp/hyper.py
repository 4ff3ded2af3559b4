"""
Hyper-Parameter MAP
===================

Maximise the Laplace log marginal likelihood plus the log hyper-prior over
(theta_1, theta_2): exhaustive search on a log-spaced grid, then Nelder-Mead
refinement in log space inside the same box.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.stats import halfnorm
from loguru import logger

from ..utils.errors import RiskscopeError
from .kernel import KernelParams, kernel_matrix, squared_distances
from .laplace import laplace_fit


@dataclass(frozen=True)
class HyperPrior:
    """
    Independent half-normal priors on both kernel parameters.

    Attributes:
        amplitude_sd: Scale of the half-normal prior on theta_1
        inv_length_sd: Scale of the half-normal prior on theta_2
        bounds: Search box (low, high) shared by both parameters
        grid_size: Points per axis of the coarse search
    """
    amplitude_sd: float = 1.0
    inv_length_sd: float = 1.0
    bounds: Tuple[float, float] = (1e-2, 1e2)
    grid_size: int = 15

    def log_pdf(self, params: KernelParams) -> float:
        return float(
            halfnorm.logpdf(params.amplitude, scale=self.amplitude_sd)
            + halfnorm.logpdf(params.inv_length, scale=self.inv_length_sd)
        )

    def mode(self) -> KernelParams:
        """Maximiser of the prior on the search box (its lower corner)."""
        return KernelParams(self.bounds[0], self.bounds[0])

    def search_axis(self) -> np.ndarray:
        low, high = np.log10(self.bounds)
        return np.logspace(low, high, self.grid_size)


def hyper_objective(
    counts: np.ndarray,
    params: KernelParams,
    prior: HyperPrior,
    sqdist: np.ndarray
) -> float:
    """Laplace log marginal likelihood plus log hyper-prior."""
    fit = laplace_fit(kernel_matrix(None, params, sqdist), counts)
    return fit.log_marginal + prior.log_pdf(params)


def hyper_map(
    centers: np.ndarray,
    counts: np.ndarray,
    prior: Optional[HyperPrior] = None,
    refine: bool = True
) -> KernelParams:
    """
    MAP kernel hyper-parameters for one level.

    With all counts zero the marginal likelihood is exactly 0 for every
    theta, so the result is the prior's maximiser on the box (lower corner).

    Args:
        centers: Grid cell centers (n_cells, d)
        counts: Cell counts of the level
        prior: Hyper-prior and search box
        refine: Run Nelder-Mead after the grid search

    Returns:
        KernelParams
    """
    prior = prior or HyperPrior()
    counts = np.asarray(counts, dtype=float)
    if counts.sum() == 0:
        logger.info("No samples for this level; using the hyper-prior mode")
        return prior.mode()

    sqdist = squared_distances(centers)

    def evaluate(amplitude: float, inv_length: float) -> float:
        try:
            return hyper_objective(counts, KernelParams(amplitude, inv_length), prior, sqdist)
        except RiskscopeError as e:
            logger.debug(f"Hyper-parameters ({amplitude:.3g}, {inv_length:.3g}) failed: {e}")
            return -np.inf

    axis = prior.search_axis()
    scores = np.array([[evaluate(t1, t2) for t2 in axis] for t1 in axis])
    if not np.any(np.isfinite(scores)):
        logger.warning("Every hyper-parameter grid point failed; falling back to the prior mode")
        return prior.mode()

    i, j = np.unravel_index(np.argmax(scores), scores.shape)
    best = KernelParams(float(axis[i]), float(axis[j]))
    best_score = float(scores[i, j])

    if refine:
        log_bounds = [tuple(np.log(prior.bounds))] * 2
        result = minimize(
            lambda z: -evaluate(*np.exp(z)),
            x0=np.log([best.amplitude, best.inv_length]),
            method='Nelder-Mead',
            bounds=log_bounds,
            options={'xatol': 1e-3, 'fatol': 1e-6, 'maxiter': 200}
        )
        amplitude, inv_length = (float(v) for v in np.clip(np.exp(result.x), *prior.bounds))
        refined_score = evaluate(amplitude, inv_length)
        if refined_score > best_score:
            best = KernelParams(amplitude, inv_length)
            best_score = refined_score

    logger.info(f"Hyper-parameters theta = ({best.amplitude:.4g}, {best.inv_length:.4g}), objective {best_score:.3f}")
    return best


__all__ = ['HyperPrior', 'hyper_objective', 'hyper_map']
