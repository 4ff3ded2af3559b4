"""
World Description
=================

Rectangular world with walls, obstacles and named motion areas, loaded from
a versioned YAML file.
"""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np
import yaml
from loguru import logger

from ..utils.errors import InvalidParameter, InvalidState

WORLD_SCHEMA_VERSION = 1
RULES = ('A', 'B', 'C', 'D', 'E', 'F', 'G')
DEFAULT_WORLD = Path(__file__).resolve().parents[2] / "worlds" / "robot_world.yaml"

Rect = Tuple[float, float, float, float]


@dataclass(frozen=True)
class Area:
    """Named area made of one or more closed rectangles."""
    name: str
    rule: str
    rects: Tuple[Rect, ...]


@dataclass(frozen=True)
class World:
    """
    Planar environment of the robot benchmark.

    Attributes:
        region: Outer walls as (x0_min, x0_max, x1_min, x1_max)
        obstacles: Impenetrable rectangles
        areas: Motion areas in lookup order
        goal: Goal point
    """
    region: Rect = (0.0, 40.0, 0.0, 40.0)
    obstacles: Tuple[Rect, ...] = ()
    areas: Tuple[Area, ...] = ()
    goal: Tuple[float, float] = (35.0, 5.0)
    version: int = WORLD_SCHEMA_VERSION
    _rect_table: np.ndarray = field(default=None, init=False, repr=False, compare=False)
    _rect_owner: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for area in self.areas:
            if area.rule not in RULES:
                raise InvalidParameter(f"Unknown motion rule {area.rule!r} for area {area.name}")
        rects, owners = [], []
        for i, area in enumerate(self.areas):
            for rect in area.rects:
                rects.append(rect)
                owners.append(i)
        object.__setattr__(self, '_rect_table', np.array(rects, dtype=float).reshape(-1, 4))
        object.__setattr__(self, '_rect_owner', np.array(owners, dtype=int))

    @classmethod
    def from_dict(cls, payload: Dict) -> 'World':
        version = int(payload.get('version', WORLD_SCHEMA_VERSION))
        if version != WORLD_SCHEMA_VERSION:
            raise InvalidParameter(f"Unsupported world schema version {version}")
        areas = tuple(
            Area(name=str(a['name']), rule=str(a.get('rule', a['name'])),
                 rects=tuple(tuple(float(v) for v in r) for r in a['rects']))
            for a in payload.get('areas', [])
        )
        return cls(
            region=tuple(float(v) for v in payload['region']),
            obstacles=tuple(tuple(float(v) for v in r) for r in payload.get('obstacles', [])),
            areas=areas,
            goal=tuple(float(v) for v in payload.get('goal', (35.0, 5.0))),
            version=version,
        )

    @classmethod
    def load(cls, path: str = str(DEFAULT_WORLD)) -> 'World':
        """Load a world description file."""
        with open(path, 'r') as f:
            world = cls.from_dict(yaml.safe_load(f))
        logger.debug(f"Loaded world from {path}: {len(world.areas)} areas, {len(world.obstacles)} obstacles")
        return world

    def to_dict(self) -> Dict:
        return {
            'version': self.version,
            'region': list(self.region),
            'goal': list(self.goal),
            'obstacles': [list(r) for r in self.obstacles],
            'areas': [{'name': a.name, 'rule': a.rule, 'rects': [list(r) for r in a.rects]} for a in self.areas],
        }

    def geometry_hash(self) -> str:
        """Short content hash used to key cached artifacts."""
        text = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]

    def area_index(self, points: np.ndarray) -> np.ndarray:
        """
        Index into ``areas`` for each point, -1 where no area matches.

        Args:
            points: Array of shape (n, 2)
        """
        points = np.atleast_2d(points)
        table = self._rect_table
        inside = (
            (points[:, None, 0] >= table[None, :, 0]) & (points[:, None, 0] <= table[None, :, 1])
            & (points[:, None, 1] >= table[None, :, 2]) & (points[:, None, 1] <= table[None, :, 3])
        )
        first = np.argmax(inside, axis=1)
        return np.where(inside.any(axis=1), self._rect_owner[first], -1)

    def in_region(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        x0min, x0max, x1min, x1max = self.region
        return (
            (points[:, 0] >= x0min) & (points[:, 0] <= x0max)
            & (points[:, 1] >= x1min) & (points[:, 1] <= x1max)
        )

    def in_obstacle(self, points: np.ndarray) -> np.ndarray:
        """True for points strictly inside an obstacle."""
        points = np.atleast_2d(points)
        hit = np.zeros(len(points), dtype=bool)
        for x0min, x0max, x1min, x1max in self.obstacles:
            hit |= (
                (points[:, 0] > x0min) & (points[:, 0] < x0max)
                & (points[:, 1] > x1min) & (points[:, 1] < x1max)
            )
        return hit

    def segment_feasible(self, start: np.ndarray, end: np.ndarray) -> np.ndarray:
        """
        True where the segment start -> end stays in the region and never
        crosses an obstacle interior (touching an edge is allowed).
        """
        ok = self.in_region(end)
        delta = end - start
        for rect in self.obstacles:
            ok &= ~_segment_hits_open_rect(start, delta, rect)
        return ok

    def check_free(self, points: np.ndarray) -> None:
        """Raise ``InvalidState`` if any point is outside the free space."""
        points = np.atleast_2d(points)
        bad = ~self.in_region(points) | self.in_obstacle(points)
        if np.any(bad):
            raise InvalidState(f"Position {points[np.argmax(bad)].tolist()} is outside the free space")


def _segment_hits_open_rect(start: np.ndarray, delta: np.ndarray, rect: Rect) -> np.ndarray:
    """Slab test of p + s * d, s in [0, 1], against the open rectangle."""
    n = len(start)
    t_enter = np.zeros(n)
    t_exit = np.ones(n)
    hit = np.ones(n, dtype=bool)
    bounds = ((rect[0], rect[1]), (rect[2], rect[3]))
    with np.errstate(divide='ignore', invalid='ignore'):
        for axis, (lo, hi) in enumerate(bounds):
            p, d = start[:, axis], delta[:, axis]
            still = np.abs(d) < 1e-15
            hit &= ~still | ((p > lo) & (p < hi))
            t0 = (lo - p) / d
            t1 = (hi - p) / d
            near = np.where(still, -np.inf, np.minimum(t0, t1))
            far = np.where(still, np.inf, np.maximum(t0, t1))
            t_enter = np.maximum(t_enter, near)
            t_exit = np.minimum(t_exit, far)
    return hit & (t_enter < t_exit)


__all__ = ['World', 'Area', 'RULES', 'DEFAULT_WORLD', 'WORLD_SCHEMA_VERSION']
