"""
Squared-Exponential Kernel
==========================

g(x, x') = theta_1 * exp(-theta_2 * ||x - x'||^2) over grid cell centers.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
from scipy.spatial.distance import cdist

from ..utils.errors import InvalidParameter


@dataclass(frozen=True)
class KernelParams:
    """
    Kernel hyper-parameters.

    Attributes:
        amplitude: theta_1 > 0
        inv_length: theta_2 > 0 (inverse squared length scale)
    """
    amplitude: float
    inv_length: float

    def __post_init__(self):
        for name in ('amplitude', 'inv_length'):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidParameter(f"Kernel {name} must be positive and finite, got {value}")

    @property
    def length_scale(self) -> float:
        """RBF length scale l with exp(-d^2 / (2 l^2)) = exp(-theta_2 d^2)."""
        return float(1.0 / np.sqrt(2.0 * self.inv_length))

    def to_dict(self) -> Dict[str, Any]:
        return {'amplitude': self.amplitude, 'inv_length': self.inv_length}

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> 'KernelParams':
        return cls(float(payload['amplitude']), float(payload['inv_length']))


def squared_distances(points: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances."""
    points = np.atleast_2d(points)
    return cdist(points, points, metric='sqeuclidean')


def kernel_matrix(points: np.ndarray, params: KernelParams, sqdist: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Kernel matrix over a set of points.

    Args:
        points: Array of shape (n, d)
        params: Kernel hyper-parameters
        sqdist: Precomputed squared distances (reused across hyper-parameters)

    Returns:
        Symmetric (n, n) matrix
    """
    if sqdist is None:
        sqdist = squared_distances(points)
    K = params.amplitude * np.exp(-params.inv_length * sqdist)
    return 0.5 * (K + K.T)


__all__ = ['KernelParams', 'squared_distances', 'kernel_matrix']
