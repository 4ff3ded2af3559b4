"""
Robustness Levels
=================

Partition of the real line into m disjoint, left-open/right-closed intervals
L_0 = (-inf, c_0], L_1 = (c_0, c_1], ..., L_{m-1} = (c_{m-2}, inf).
Level indices are 0-based.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from ..utils.errors import InvalidParameter, NonFinite


@dataclass(frozen=True)
class RobustnessLevels:
    """
    Discretisation of robustness values into levels.

    Example:
        >>> levels = RobustnessLevels.parse("-10,0")
        >>> levels.classify(-10.0), levels.classify(0.0), levels.classify(0.001)
        (0, 1, 2)
    """
    boundaries: Tuple[float, ...]

    def __post_init__(self):
        bounds = tuple(float(b) for b in self.boundaries)
        if not all(np.isfinite(bounds)):
            raise InvalidParameter("Level boundaries must be finite")
        if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
            raise InvalidParameter(f"Level boundaries must be strictly increasing, got {bounds}")
        object.__setattr__(self, 'boundaries', bounds)

    @classmethod
    def parse(cls, text: Union[str, Sequence[float]]) -> 'RobustnessLevels':
        """Build from "b1,b2,..." or a sequence of boundaries."""
        if isinstance(text, str):
            items = [item for item in text.split(',') if item.strip()]
            return cls(tuple(float(item) for item in items))
        return cls(tuple(text))

    @property
    def m(self) -> int:
        return len(self.boundaries) + 1

    def classify(self, rho: float) -> int:
        """Level index of a single robustness value."""
        return int(self.classify_many(np.array([rho]))[0])

    def classify_many(self, rho: np.ndarray) -> np.ndarray:
        """Level indices of an array of robustness values."""
        rho = np.asarray(rho, dtype=float)
        if not np.all(np.isfinite(rho)):
            raise NonFinite("Robustness values must be finite")
        # side='left' puts a value equal to a boundary into the interval on its left
        return np.searchsorted(np.asarray(self.boundaries), rho, side='left')

    def intervals(self) -> List[Tuple[float, float]]:
        edges = (-np.inf,) + self.boundaries + (np.inf,)
        return list(zip(edges[:-1], edges[1:]))

    def to_list(self) -> List[float]:
        return list(self.boundaries)

    def __str__(self) -> str:
        parts = []
        for lo, hi in self.intervals():
            right = ")" if np.isinf(hi) else "]"
            parts.append(f"({lo:g}, {hi:g}{right}")
        return ", ".join(parts)


__all__ = ['RobustnessLevels']
