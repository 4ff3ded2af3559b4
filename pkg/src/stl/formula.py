"""
STL Formulas
============

Abstract syntax and quantitative (robustness) semantics for a practical
subset of signal temporal logic over time-sampled signals.

Temporal operators are evaluated on the sample set: sup/inf over the samples
whose timestamps fall inside the window. Windows with no sample evaluate to
NaN internally and raise ``EmptyWindow`` when they reach the requested value.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..utils.errors import EmptyWindow, InvalidParameter, UnboundCoordinate

TIME_EPS = 1e-9


@dataclass(frozen=True)
class Signal:
    """Time-sampled trajectory y(t) in R^o."""
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if times.ndim != 1 or len(times) == 0:
            raise InvalidParameter("Signal times must be a non-empty 1-D sequence")
        if np.any(np.diff(times) <= 0):
            raise InvalidParameter("Signal times must be strictly increasing")
        if values.shape[0] != times.shape[0]:
            raise InvalidParameter(f"{values.shape[0]} values for {times.shape[0]} timestamps")
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'values', values)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return len(self.times)


# ---------------------------------------------------------------------------
# Arithmetic expressions over signal coordinates
# ---------------------------------------------------------------------------

class Expr(ABC):
    """Numeric expression over y[k] evaluated per sample."""

    @abstractmethod
    def evaluate(self, values: np.ndarray) -> np.ndarray:
        """Evaluate on values of shape (n, T, o); returns shape (n, T)."""

    @abstractmethod
    def max_coordinate(self) -> int:
        """Largest coordinate index referenced, -1 when none."""


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def evaluate(self, values):
        return np.full(values.shape[:2], self.value)

    def max_coordinate(self):
        return -1

    def __str__(self):
        text = format(self.value, '.17g')
        return f"({text})" if self.value < 0 else text


@dataclass(frozen=True)
class Coord(Expr):
    index: int

    def evaluate(self, values):
        return values[:, :, self.index]

    def max_coordinate(self):
        return self.index

    def __str__(self):
        return f"y[{self.index}]"


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def evaluate(self, values):
        return -self.operand.evaluate(values)

    def max_coordinate(self):
        return self.operand.max_coordinate()

    def __str__(self):
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def evaluate(self, values):
        lhs, rhs = self.left.evaluate(values), self.right.evaluate(values)
        if self.op == '+':
            return lhs + rhs
        if self.op == '-':
            return lhs - rhs
        return lhs * rhs

    def max_coordinate(self):
        return max(self.left.max_coordinate(), self.right.max_coordinate())

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Func(Expr):
    name: str
    args: Tuple[Expr, ...]

    def evaluate(self, values):
        evaluated = [arg.evaluate(values) for arg in self.args]
        if self.name == 'abs':
            return np.abs(evaluated[0])
        if self.name == 'min':
            return np.minimum.reduce(evaluated)
        return np.maximum.reduce(evaluated)

    def max_coordinate(self):
        return max(arg.max_coordinate() for arg in self.args)

    def __str__(self):
        return f"{self.name}({', '.join(str(arg) for arg in self.args)})"


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

class Formula(ABC):
    """STL formula with quantitative semantics."""

    @abstractmethod
    def trace(self, times: np.ndarray, values: np.ndarray) -> np.ndarray:
        """Robustness at every sample time; values (n, T, o) -> (n, T)."""

    @abstractmethod
    def max_coordinate(self) -> int:
        """Largest coordinate index referenced, -1 when none."""


@dataclass(frozen=True)
class BoolConst(Formula):
    value: bool

    def trace(self, times, values):
        return np.full(values.shape[:2], np.inf if self.value else -np.inf)

    def max_coordinate(self):
        return -1

    def __str__(self):
        return "true" if self.value else "false"


@dataclass(frozen=True)
class Predicate(Formula):
    """``lhs > rhs`` has robustness lhs - rhs; ``lhs < rhs`` has rhs - lhs."""
    lhs: Expr
    op: str
    rhs: Expr

    def trace(self, times, values):
        diff = self.lhs.evaluate(values) - self.rhs.evaluate(values)
        return diff if self.op == '>' else -diff

    def max_coordinate(self):
        return max(self.lhs.max_coordinate(), self.rhs.max_coordinate())

    def __str__(self):
        return f"({self.lhs} {self.op} {self.rhs})"


@dataclass(frozen=True)
class Not(Formula):
    child: Formula

    def trace(self, times, values):
        return -self.child.trace(times, values)

    def max_coordinate(self):
        return self.child.max_coordinate()

    def __str__(self):
        return f"!{self.child}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def trace(self, times, values):
        return np.minimum(self.left.trace(times, values), self.right.trace(times, values))

    def max_coordinate(self):
        return max(self.left.max_coordinate(), self.right.max_coordinate())

    def __str__(self):
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def trace(self, times, values):
        return np.maximum(self.left.trace(times, values), self.right.trace(times, values))

    def max_coordinate(self):
        return max(self.left.max_coordinate(), self.right.max_coordinate())

    def __str__(self):
        return f"({self.left} | {self.right})"


def _check_interval(a: float, b: float) -> None:
    if not (0 <= a <= b < np.inf):
        raise InvalidParameter(f"Temporal interval must satisfy 0 <= a <= b < inf, got [{a}, {b}]")


def _windows(times: np.ndarray, a: float, b: float) -> Tuple[np.ndarray, np.ndarray]:
    """Sample index ranges [lo, hi) with times in [t + a, t + b] for every t."""
    lo = np.searchsorted(times, times + a - TIME_EPS, side='left')
    hi = np.searchsorted(times, times + b + TIME_EPS, side='right')
    return lo, hi


def _fmt(x: float) -> str:
    return format(x, '.17g')


@dataclass(frozen=True)
class Eventually(Formula):
    a: float
    b: float
    child: Formula

    def __post_init__(self):
        _check_interval(self.a, self.b)

    def trace(self, times, values):
        inner = self.child.trace(times, values)
        out = np.full(inner.shape, np.nan)
        lo, hi = _windows(times, self.a, self.b)
        for i in range(len(times)):
            if lo[i] < hi[i]:
                out[:, i] = np.max(inner[:, lo[i]:hi[i]], axis=1)
        return out

    def max_coordinate(self):
        return self.child.max_coordinate()

    def __str__(self):
        return f"F[{_fmt(self.a)},{_fmt(self.b)}] {self.child}"


@dataclass(frozen=True)
class Always(Formula):
    a: float
    b: float
    child: Formula

    def __post_init__(self):
        _check_interval(self.a, self.b)

    def trace(self, times, values):
        inner = self.child.trace(times, values)
        out = np.full(inner.shape, np.nan)
        lo, hi = _windows(times, self.a, self.b)
        for i in range(len(times)):
            if lo[i] < hi[i]:
                out[:, i] = np.min(inner[:, lo[i]:hi[i]], axis=1)
        return out

    def max_coordinate(self):
        return self.child.max_coordinate()

    def __str__(self):
        return f"G[{_fmt(self.a)},{_fmt(self.b)}] {self.child}"


@dataclass(frozen=True)
class Until(Formula):
    """
    rho(l U[a,b] r, t) = max over t' in [t+a, t+b] of
    min(rho(r, t'), min over t'' in [t, t'] of rho(l, t'')).

    The left operand must also hold at t' itself.
    """
    a: float
    b: float
    left: Formula
    right: Formula

    def __post_init__(self):
        _check_interval(self.a, self.b)

    def trace(self, times, values):
        lhs = self.left.trace(times, values)
        rhs = self.right.trace(times, values)
        n, T = lhs.shape
        out = np.full((n, T), np.nan)
        lo, hi = _windows(times, self.a, self.b)
        for i in range(T):
            if lo[i] >= hi[i]:
                continue
            # running[:, k]: min of the left trace over samples i..i+k
            running = np.minimum.accumulate(lhs[:, i:], axis=1)
            candidates = np.minimum(rhs[:, i:], running)
            out[:, i] = np.max(candidates[:, lo[i] - i:hi[i] - i], axis=1)
        return out

    def max_coordinate(self):
        return max(self.left.max_coordinate(), self.right.max_coordinate())

    def __str__(self):
        return f"({self.left} U[{_fmt(self.a)},{_fmt(self.b)}] {self.right})"


# ---------------------------------------------------------------------------
# Evaluation entry points
# ---------------------------------------------------------------------------

def _check_coordinates(phi: Formula, dim: int) -> None:
    k = phi.max_coordinate()
    if k >= dim:
        raise UnboundCoordinate(f"Formula references y[{k}] but the signal has dimension {dim}")


def _time_index(times: np.ndarray, t: float) -> int:
    idx = int(np.searchsorted(times, t - TIME_EPS, side='left'))
    if idx >= len(times) or abs(times[idx] - t) > TIME_EPS:
        raise InvalidParameter(f"t={t} is not a sample time of the signal")
    return idx


def robustness_batch(phi: Formula, times: np.ndarray, values: np.ndarray, t: float = 0.0) -> np.ndarray:
    """
    Robustness of many trajectories sharing one time base.

    Args:
        phi: Formula
        times: Shared timestamps of shape (T,)
        values: Trajectories of shape (n, T, o)
        t: Evaluation time (must be a sample time)

    Returns:
        Robustness values of shape (n,)
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.ndim != 3 or values.shape[1] != len(times):
        raise InvalidParameter(f"Expected values of shape (n, {len(times)}, o), got {values.shape}")
    _check_coordinates(phi, values.shape[2])
    idx = _time_index(times, t)
    rho = phi.trace(times, values)[:, idx]
    if np.any(np.isnan(rho)):
        raise EmptyWindow(f"A temporal window of {phi} contains no sample at t={t}")
    return rho


def robustness(phi: Formula, y: Signal, t: float = 0.0) -> float:
    """Robustness degree of a single signal at time t."""
    return float(robustness_batch(phi, y.times, y.values[None, :, :], t)[0])


__all__ = [
    'Signal', 'Expr', 'Const', 'Coord', 'Neg', 'BinOp', 'Func',
    'Formula', 'BoolConst', 'Predicate', 'Not', 'And', 'Or', 'Eventually', 'Always', 'Until',
    'robustness', 'robustness_batch'
]
