"""
Ground-Truth Proxy
==================

High-sample stand-in for the unknown level-probability field pi(x).

M inputs are drawn uniformly over the input region, simulated and labeled.
At every grid center the proxy is the ratio of level-wise kernel sums

    pi_l(x) = N_l k_l(x) / sum_i N_i k_i(x)

where k_l is a Gaussian KDE over the level-l inputs. The expensive sample
stage is cached on disk.
"""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from ..baselines.kde import log_kernel_sum
from ..dlgp.levels import RobustnessLevels
from ..lgp.grid import Grid, make_grid
from ..numerics import Rng, softmax
from ..stl import Formula
from ..utils.errors import DegenerateTruth, InvalidParameter
from ..utils.helpers import load_json, save_json
from .dataset import LabeledDataset, label_inputs
from .robot import SimConfig
from .systems import RobotSystem
from .world import World

SCHEMA_VERSION = 1


@dataclass
class TruthConfig:
    """Truth proxy settings."""
    n_samples: int = 20000
    bandwidth: float = 0.01
    grid_width: float = 0.5
    seed: int = 0
    cache_dir: Optional[str] = "cache"

    def __post_init__(self):
        if self.n_samples < 1:
            raise InvalidParameter(f"n_samples must be >= 1, got {self.n_samples}")
        if not self.bandwidth > 0:
            raise InvalidParameter(f"bandwidth must be positive, got {self.bandwidth}")
        if self.n_samples < 1000:
            logger.warning(f"Truth proxy with only {self.n_samples} samples will be noisy")

    @classmethod
    def from_dict(cls, payload: Optional[Dict[str, Any]]) -> 'TruthConfig':
        payload = payload or {}
        known = {k: v for k, v in payload.items() if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass
class TruthField:
    """
    Probability vector per grid cell.

    Attributes:
        grid: Grid the field lives on
        pi: Array of shape (n_cells, m), rows on the simplex
    """
    grid: Grid
    pi: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.pi.shape[1]

    def at(self, x: np.ndarray) -> np.ndarray:
        """Probability vectors at arbitrary inputs (containing cell)."""
        return self.pi[self.grid.cell_index(x)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'grid': self.grid.to_dict(),
            'pi': self.pi,
            'metadata': self.metadata,
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> 'TruthField':
        if payload.get('schema_version') != SCHEMA_VERSION:
            raise InvalidParameter(f"Unsupported truth schema version {payload.get('schema_version')}")
        grid = Grid.from_dict(payload['grid'])
        pi = np.asarray(payload['pi'], dtype=float)
        if pi.shape[0] != grid.n_cells:
            raise InvalidParameter(f"Truth field has {pi.shape[0]} rows for {grid.n_cells} cells")
        return cls(grid=grid, pi=pi, metadata=payload.get('metadata', {}))

    def save(self, filepath: str) -> None:
        save_json(self.to_dict(), filepath)

    @classmethod
    def load(cls, filepath: str) -> 'TruthField':
        logger.info(f"Loading truth field from {filepath}")
        return cls.from_dict(load_json(filepath))


def level_ratio_field(samples: LabeledDataset, queries: np.ndarray, bandwidth: float) -> np.ndarray:
    """
    Ratio of level-wise kernel sums at query points.

    sum_{i in X_l} K_h(x - x_i) equals N_l k_l(x), so the softmax of the log
    kernel sums across levels is the normalised pseudo-count ratio.
    """
    counts = samples.level_counts()
    if np.any(counts == 0):
        empty = np.nonzero(counts == 0)[0].tolist()
        raise DegenerateTruth(f"Levels {empty} received no samples")
    log_sums = np.column_stack([
        log_kernel_sum(samples.subset(l), queries, bandwidth) for l in range(samples.m)
    ])
    # Far from every sample all sums underflow to -inf; fall back to the level frequencies
    lost = ~np.any(np.isfinite(log_sums), axis=1)
    if np.any(lost):
        logger.warning(f"{int(lost.sum())} grid centers have no sample within reach of bandwidth {bandwidth}")
        log_sums[lost] = np.log(counts)
    return softmax(log_sums, axis=1)


def _cache_key(rng: Rng, n_samples: int, world: World, system_tag: str, levels: RobustnessLevels, config: SimConfig) -> str:
    material = json.dumps({
        'entropy': rng.seed,
        'spawn_key': list(rng.seed_sequence.spawn_key),
        'n': n_samples,
        'geometry': world.geometry_hash(),
        'system': system_tag,
        'levels': levels.to_list(),
        'sim': repr(config),
    }, sort_keys=True)
    return hashlib.sha256(material.encode("utf-8")).hexdigest()[:20]


def sample_uniform_labels(
    n_samples: int,
    levels: RobustnessLevels,
    rng: Rng,
    system,
    region: tuple,
    cache_path: Optional[Path] = None
) -> LabeledDataset:
    """Uniform inputs over the region labeled through ``system``, optionally cached as npz."""
    if cache_path is not None and cache_path.exists():
        logger.info(f"Using cached truth samples {cache_path}")
        cached = np.load(cache_path)
        return LabeledDataset.from_values(cached['inputs'], cached['rho'], levels)

    low, high = (np.asarray(b, dtype=float) for b in region)
    inputs = rng.derive("inputs").generator.uniform(low, high, size=(n_samples, len(low)))
    samples = label_inputs(system, inputs, levels, rng.derive("dynamics"))

    if cache_path is not None:
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        np.savez_compressed(cache_path, inputs=samples.inputs, rho=samples.rho)
        logger.info(f"Cached truth samples to {cache_path}")
    return samples


def build_truth_proxy(
    n_samples: int,
    bandwidth: float,
    levels: RobustnessLevels,
    phi: Optional[Formula],
    rng: Rng,
    grid: Optional[Grid] = None,
    world: Optional[World] = None,
    config: Optional[SimConfig] = None,
    system=None,
    cache_dir: Optional[str] = None
) -> TruthField:
    """
    Build the truth proxy field on a grid.

    Args:
        n_samples: Number of uniform inputs M
        bandwidth: KDE bandwidth (0.01 for the benchmark)
        levels: Robustness levels
        phi: Requirement formula (ignored when ``system`` is given)
        rng: Random stream
        grid: Evaluation grid (default: width 0.5 over the input region)
        world: Environment (default: shipped world file)
        config: Simulation config
        system: Any object with ``robustness(inputs, rng)``; defaults to the robot
        cache_dir: Directory for the npz sample cache (robot system only)

    Returns:
        TruthField on ``grid``

    Raises:
        DegenerateTruth: If some level receives zero samples
    """
    config = config or SimConfig()
    region = config.input_region
    grid = grid or make_grid(region, 0.5)
    logger.info(f"Building truth proxy from {n_samples} samples (bandwidth {bandwidth})...")

    cache_path = None
    if system is None:
        world = world or World.load()
        system = RobotSystem(world, phi, config)
        if cache_dir:
            key = _cache_key(rng, n_samples, world, str(phi), levels, config)
            cache_path = Path(cache_dir) / f"truth_{key}.npz"

    samples = sample_uniform_labels(n_samples, levels, rng, system, region, cache_path)
    logger.info(f"Truth samples per level: {samples.level_counts().tolist()}")
    pi = level_ratio_field(samples, grid.centers, bandwidth)

    metadata = {
        'n_samples': n_samples,
        'bandwidth': bandwidth,
        'levels': levels.to_list(),
        'seed': rng.seed,
    }
    logger.info(f"Truth proxy ready on {grid.n_cells} cells")
    return TruthField(grid=grid, pi=pi, metadata=metadata)


__all__ = [
    'TruthConfig', 'TruthField', 'level_ratio_field', 'sample_uniform_labels',
    'build_truth_proxy', 'SCHEMA_VERSION'
]
