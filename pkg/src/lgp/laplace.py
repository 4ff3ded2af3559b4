"""
Laplace Approximation
=====================

Gaussian approximation of the posterior of the latent field f over grid
cells given the level's cell counts c (N = sum c):

    log p(c | f) = c . f - N log sum_k exp(f_k)
    f ~ N(0, K)

Newton iterations run in the a-parametrisation f = K a, so K is never
inverted. With p = softmax(f) the negative Hessian of the likelihood is

    W = N (diag(p) - p p^T) = D - u u^T,  D = N diag(p),  u = sqrt(N) p

and (K^-1 + W)^-1 is built from B = I + D^1/2 K D^1/2 (well conditioned)
followed by a Sherman-Morrison update for the rank-one term.
"""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.linalg import solve_triangular
from loguru import logger

from ..numerics import cholesky, logsumexp, psd_factor, softmax
from ..utils.errors import InvalidParameter, NoConvergence

MAX_NEWTON_ITERATIONS = 100
GRADIENT_TOL = 1e-6
MAX_HALVINGS = 40
_DENOM_FLOOR = 1e-12


def log_likelihood(counts: np.ndarray, f: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    Multinomial log-likelihood of cell counts under softmax(f).

    Args:
        counts: Cell counts c of one level
        f: Latent field values, same length as counts

    Returns:
        Tuple of (value, gradient) with gradient c - N softmax(f)
    """
    counts = np.asarray(counts, dtype=float)
    f = np.asarray(f, dtype=float)
    if counts.shape != f.shape:
        raise InvalidParameter(f"counts {counts.shape} and field {f.shape} differ in shape")
    n = counts.sum()
    if n == 0:
        return 0.0, np.zeros_like(f)
    value = float(counts @ f - n * logsumexp(f))
    return value, counts - n * softmax(f)


@dataclass
class LaplaceFit:
    """
    Result of a Laplace fit.

    Attributes:
        mode: Posterior mode f_hat over cells
        cov: Posterior covariance (K^-1 + W)^-1
        log_marginal: Laplace approximation of log p(c | theta)
        iterations: Accepted Newton steps
        gradient_norm: ||grad log p(f | c)|| at the mode
        objective_trace: Objective after each accepted step
    """
    mode: np.ndarray
    cov: np.ndarray
    log_marginal: float
    iterations: int
    gradient_norm: float
    objective_trace: List[float] = field(default_factory=list)
    _factor: np.ndarray = field(default=None, repr=False)

    @property
    def factor(self) -> np.ndarray:
        """Square-root factor of ``cov``."""
        if self._factor is None:
            self._factor = psd_factor(self.cov)
        return self._factor


def _curvature(K: np.ndarray, p: np.ndarray, n: float):
    """Posterior covariance and determinant terms at softmax probabilities p."""
    sqrt_d = np.sqrt(n * p)
    B = np.eye(len(p)) + sqrt_d[:, None] * K * sqrt_d[None, :]
    L_B = cholesky(0.5 * (B + B.T))
    M = solve_triangular(L_B, sqrt_d[:, None] * K, lower=True)
    A = K - M.T @ M
    u = np.sqrt(n) * p
    Au = A @ u
    denom = max(1.0 - float(u @ Au), _DENOM_FLOOR)
    cov = A + np.outer(Au, Au) / denom
    log_det = 2.0 * np.sum(np.log(np.diag(L_B))) + np.log(denom)
    return 0.5 * (cov + cov.T), log_det


def laplace_fit(
    K: np.ndarray,
    counts: np.ndarray,
    max_iter: int = MAX_NEWTON_ITERATIONS,
    tol: float = GRADIENT_TOL
) -> LaplaceFit:
    """
    Fit the Laplace approximation for one level.

    Args:
        K: Prior covariance over grid cells (kernel matrix)
        counts: Cell counts of the level
        max_iter: Newton iteration cap
        tol: Gradient norm at which the mode is accepted

    Returns:
        LaplaceFit

    Raises:
        NoConvergence: If the gradient norm is still above ``tol`` after
            ``max_iter`` iterations
    """
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    size = len(counts)
    if K.shape != (size, size):
        raise InvalidParameter(f"Kernel {K.shape} does not match {size} cells")

    f = np.zeros(size)
    a = np.zeros(size)

    def objective(f_, a_):
        value, grad = log_likelihood(counts, f_)
        return value - 0.5 * float(a_ @ f_), grad

    psi, grad = objective(f, a)
    trace = [psi]
    iterations = 0
    for iterations in range(max_iter + 1):
        gradient_norm = float(np.linalg.norm(grad - a))
        if gradient_norm < tol:
            break
        if iterations == max_iter:
            raise NoConvergence(f"Newton iterations did not converge in {max_iter} steps (gradient norm {gradient_norm:.3e})")

        p = softmax(f)
        cov, _ = _curvature(K, p, n)
        Wf = n * p * f - n * p * float(p @ f)
        b = Wf + grad
        f_newton = cov @ b
        a_newton = b - (n * p * f_newton - n * p * float(p @ f_newton))

        step = 1.0
        for _ in range(MAX_HALVINGS):
            f_try = f + step * (f_newton - f)
            a_try = a + step * (a_newton - a)
            psi_try, grad_try = objective(f_try, a_try)
            if psi_try >= psi - 1e-12 * max(1.0, abs(psi)):
                break
            step *= 0.5
        else:
            if gradient_norm < np.sqrt(tol) * max(1.0, n):
                logger.debug(f"Line search stalled at gradient norm {gradient_norm:.3e}; accepting mode")
                break
            raise NoConvergence(f"Line search stalled at gradient norm {gradient_norm:.3e}")

        f, a, psi, grad = f_try, a_try, psi_try, grad_try
        trace.append(psi)
        logger.debug(f"Newton step {iterations + 1}: objective {psi:.6f}, step {step:g}")

    cov, log_det = _curvature(K, softmax(f), n)
    return LaplaceFit(
        mode=f,
        cov=cov,
        log_marginal=float(psi - 0.5 * log_det),
        iterations=len(trace) - 1,
        gradient_norm=float(np.linalg.norm(grad - a)),
        objective_trace=trace,
    )


__all__ = ['log_likelihood', 'LaplaceFit', 'laplace_fit', 'MAX_NEWTON_ITERATIONS', 'GRADIENT_TOL']
