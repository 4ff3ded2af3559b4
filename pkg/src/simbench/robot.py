"""
Robot Dynamics
==============

Stochastic kinematic robot of the benchmark: per-area direction rules,
uniform speed noise and collision avoidance by reselecting the nearest
feasible direction. Simulation is vectorised over robots.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
from loguru import logger

from ..numerics import Rng
from ..stl import Signal
from ..utils.errors import InvalidParameter
from .world import World

# Candidate offsets from the drawn direction: 0, -15, +15, -30, +30, ... deg.
# Negative (clockwise) first breaks ties.
_OFFSETS = np.deg2rad(np.array([0.0] + [s * k for k in range(15, 181, 15) for s in (-1, 1)]))


@dataclass
class SimConfig:
    """Configuration of the robot simulation."""
    dt: float = 0.1
    horizon: float = 10.0
    base_speed: float = 0.3
    speed_noise: float = 0.5
    input_low: Tuple[float, float] = (0.0, 0.0)
    input_high: Tuple[float, float] = (10.0, 10.0)
    sigmoid: str = "printed"

    def __post_init__(self):
        if self.dt <= 0:
            raise InvalidParameter(f"dt must be positive, got {self.dt}")
        steps = self.horizon / self.dt
        if abs(steps - round(steps)) > 1e-9:
            raise InvalidParameter(f"horizon {self.horizon} is not a multiple of dt {self.dt}")
        if self.sigmoid not in ("printed", "conventional"):
            raise InvalidParameter(f"sigmoid must be 'printed' or 'conventional', got {self.sigmoid!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.n_steps + 1)

    @property
    def input_region(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.input_low, dtype=float), np.asarray(self.input_high, dtype=float)

    @classmethod
    def from_dict(cls, payload: Optional[Dict[str, Any]]) -> 'SimConfig':
        payload = dict(payload or {})
        for key in ('input_low', 'input_high'):
            if key in payload:
                payload[key] = tuple(payload[key])
        return cls(**payload)


def sigmoid(x: np.ndarray, variant: str = "printed") -> np.ndarray:
    """Printed form 1 / (1 + exp(x)); ``conventional`` uses exp(-x)."""
    sign = 1.0 if variant == "printed" else -1.0
    return 0.5 * (1.0 - np.tanh(0.5 * sign * np.asarray(x, dtype=float)))


def sample_input(rng: Rng, n: Optional[int] = None, config: Optional[SimConfig] = None) -> np.ndarray:
    """
    Draw initial positions from the clipped two-component Gaussian mixture.

    Components N((1, 5), diag(2, 10)) and N((5, 1), diag(10, 2)) with equal
    weight; coordinates are clipped to the input region.

    Args:
        rng: Random stream
        n: Number of inputs (None for a single point of shape (2,))
        config: Simulation config providing the input region

    Returns:
        Array of shape (n, 2) or (2,)
    """
    config = config or SimConfig()
    count = 1 if n is None else n
    gen = rng.generator
    component = gen.random(count) < 0.5
    means = np.where(component[:, None], [1.0, 5.0], [5.0, 1.0])
    stds = np.where(component[:, None], np.sqrt([2.0, 10.0]), np.sqrt([10.0, 2.0]))
    raw = means + stds * gen.standard_normal((count, 2))
    low, high = config.input_region
    x = np.clip(raw, low, high)
    return x[0] if n is None else x


def _directions(world: World, positions: np.ndarray, rng: Rng, config: SimConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Draw a heading (radians) and a stay flag for every robot."""
    n = len(positions)
    area = world.area_index(positions)
    if np.any(area < 0):
        world.check_free(positions[area < 0])
        raise InvalidParameter(f"Position {positions[area < 0][0].tolist()} lies in no area")
    rules = np.array([a.rule for a in world.areas])[area]
    u = rng.generator.random(n)
    x0, x1 = positions[:, 0], positions[:, 1]

    heading = np.zeros(n)
    stay = np.zeros(n, dtype=bool)

    m = rules == 'A'
    up = u < sigmoid(x0 - x1, config.sigmoid)
    heading[m] = np.where(up[m], np.pi / 2, 0.0)

    m = rules == 'B'
    upper = u < sigmoid(5.0 - x1, config.sigmoid)
    heading[m] = np.where(upper[m], np.deg2rad(60.0), -np.deg2rad(60.0))

    m = rules == 'C'
    stay[m] = u[m] >= 0.3

    heading[rules == 'D'] = np.deg2rad(30.0)

    m = rules == 'E'
    stay[m] = u[m] >= 0.9

    heading[rules == 'G'] = -np.pi / 2
    # F keeps heading 0 (right)
    return heading, stay


def step_batch(positions: np.ndarray, rng: Rng, world: World, config: Optional[SimConfig] = None) -> np.ndarray:
    """
    Advance many robots by one time step.

    Args:
        positions: Array of shape (n, 2) in free space
        rng: Random stream
        world: Environment
        config: Simulation config

    Returns:
        Next positions of shape (n, 2)
    """
    config = config or SimConfig()
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    world.check_free(positions)

    heading, stay = _directions(world, positions, rng, config)
    distance = config.base_speed + rng.generator.uniform(0.0, config.speed_noise, len(positions))

    nxt = positions.copy()
    pending = ~stay
    for offset in _OFFSETS:
        if not pending.any():
            break
        idx = np.nonzero(pending)[0]
        angle = heading[idx] + offset
        start = positions[idx]
        end = start + distance[idx, None] * np.column_stack([np.cos(angle), np.sin(angle)])
        ok = world.segment_feasible(start, end)
        nxt[idx[ok]] = end[ok]
        pending[idx[ok]] = False
    if pending.any():
        logger.debug(f"{int(pending.sum())} robots boxed in; holding position")
    return nxt


def step(position: np.ndarray, rng: Rng, world: World, config: Optional[SimConfig] = None) -> np.ndarray:
    """Advance a single robot by one time step."""
    return step_batch(np.asarray(position, dtype=float)[None, :], rng, world, config)[0]


def simulate_batch(starts: np.ndarray, rng: Rng, world: World, config: Optional[SimConfig] = None) -> np.ndarray:
    """
    Simulate many robots over the horizon.

    Returns:
        Trajectories of shape (n, n_steps + 1, 2); the first sample is the start
    """
    config = config or SimConfig()
    starts = np.asarray(starts, dtype=float).reshape(-1, 2)
    traj = np.empty((len(starts), config.n_steps + 1, 2))
    traj[:, 0] = starts
    for k in range(config.n_steps):
        traj[:, k + 1] = step_batch(traj[:, k], rng, world, config)
    return traj


def simulate(x: np.ndarray, rng: Rng, world: World, config: Optional[SimConfig] = None) -> Signal:
    """Simulate one robot and return its trajectory as a ``Signal``."""
    config = config or SimConfig()
    traj = simulate_batch(np.asarray(x, dtype=float)[None, :], rng, world, config)[0]
    return Signal(config.times, traj)


__all__ = ['SimConfig', 'sigmoid', 'sample_input', 'step', 'step_batch', 'simulate', 'simulate_batch']
