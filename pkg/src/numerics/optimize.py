"""
Scalar Optimization
===================

Grid-then-refine maximisation for objectives that need not be unimodal.
"""

from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from ..utils.errors import InvalidParameter

GRID_POINTS = 200


def maximize_1d(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-6,
    grid_points: int = GRID_POINTS
) -> float:
    """
    Maximise a scalar function on [lo, hi].

    Evaluates a uniform grid, then refines with bounded golden-section/Brent
    search on the two grid intervals around the best grid point. The refined
    point is returned only if it is at least as good as the best grid point.

    Args:
        f: Objective
        lo: Lower bound
        hi: Upper bound
        tol: Absolute tolerance of the refinement interval
        grid_points: Size of the initial grid

    Returns:
        Argmax in [lo, hi]
    """
    if not lo < hi:
        raise InvalidParameter(f"Need lo < hi, got [{lo}, {hi}]")

    grid = np.linspace(lo, hi, grid_points)
    values = np.array([f(float(x)) for x in grid], dtype=float)
    values = np.where(np.isnan(values), -np.inf, values)
    best = int(np.argmax(values))
    x_best, f_best = float(grid[best]), float(values[best])

    left = float(grid[max(best - 1, 0)])
    right = float(grid[min(best + 1, grid_points - 1)])
    result = minimize_scalar(
        lambda x: -f(float(x)),
        bounds=(left, right),
        method='bounded',
        options={'xatol': tol}
    )
    x_ref = float(np.clip(result.x, lo, hi))
    f_ref = f(x_ref)
    if np.isfinite(f_ref) and f_ref >= f_best:
        return x_ref
    return x_best


__all__ = ['maximize_1d']
