"""
Stochastic Systems
==================

Black-box systems mapping an input to a random robustness value: the robot
benchmark evaluated against an STL requirement, and a synthetic system with a
known level-probability field used to check estimators against ground truth.
"""

from typing import Callable, Optional

import numpy as np
from loguru import logger

from ..dlgp.levels import RobustnessLevels
from ..numerics import Rng
from ..stl import Formula, robustness_batch
from .robot import SimConfig, simulate_batch
from .world import World


class RobotSystem:
    """
    Robot benchmark: simulate from each input and score the trajectory.

    Example:
        >>> system = RobotSystem(World.load(), parse("F[0,10] (y[0] > 30)"))
        >>> rho = system.robustness(np.array([[1.0, 5.0]]), Rng(0))
    """

    def __init__(self, world: World, phi: Formula, config: Optional[SimConfig] = None, chunk_size: int = 10000):
        self.world = world
        self.phi = phi
        self.config = config or SimConfig()
        self.chunk_size = chunk_size

    def robustness(self, inputs: np.ndarray, rng: Rng) -> np.ndarray:
        """Robustness degree of one simulated trajectory per input."""
        inputs = np.asarray(inputs, dtype=float).reshape(-1, 2)
        times = self.config.times
        out = np.empty(len(inputs))
        for start in range(0, len(inputs), self.chunk_size):
            stop = min(start + self.chunk_size, len(inputs))
            traj = simulate_batch(inputs[start:stop], rng, self.world, self.config)
            out[start:stop] = robustness_batch(self.phi, times, traj)
            if len(inputs) > self.chunk_size:
                logger.debug(f"Simulated {stop}/{len(inputs)} trajectories")
        return out


class SyntheticSystem:
    """
    System with a known level-probability field pi(x).

    A level is drawn from pi(x) and the returned robustness value is a fixed
    representative point of that level's interval.

    Args:
        prob_fn: Maps inputs (n, d) to probability vectors (n, m)
        levels: Robustness levels the representatives are taken from
    """

    def __init__(self, prob_fn: Callable[[np.ndarray], np.ndarray], levels: RobustnessLevels):
        self.prob_fn = prob_fn
        self.levels = levels
        reps = []
        for lo, hi in levels.intervals():
            if np.isinf(lo) and np.isinf(hi):
                reps.append(0.0)
            elif np.isinf(lo):
                reps.append(hi - 1.0)
            elif np.isinf(hi):
                reps.append(lo + 1.0)
            else:
                reps.append(0.5 * (lo + hi))
        self.representatives = np.array(reps)

    @classmethod
    def constant(cls, pi: np.ndarray, levels: RobustnessLevels) -> 'SyntheticSystem':
        pi = np.asarray(pi, dtype=float)
        return cls(lambda x: np.tile(pi, (len(x), 1)), levels)

    def probabilities(self, inputs: np.ndarray) -> np.ndarray:
        return np.asarray(self.prob_fn(np.atleast_2d(inputs)), dtype=float)

    def robustness(self, inputs: np.ndarray, rng: Rng) -> np.ndarray:
        probs = self.probabilities(inputs)
        cdf = np.cumsum(probs, axis=1)
        u = rng.generator.random(len(probs))[:, None]
        level = np.minimum((u > cdf).sum(axis=1), self.levels.m - 1)
        return self.representatives[level]


__all__ = ['RobotSystem', 'SyntheticSystem']
