"""
Labeled Datasets
================

Generate, save and load input/robustness/level datasets.

Dataset file: CSV with header ``x0,x1,rho,level`` (one ``x`` column per
input dimension), floats printed with 17 significant digits, 0-based levels.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
import pandera as pa
from loguru import logger

from ..dlgp.levels import RobustnessLevels
from ..numerics import Rng
from ..stl import Formula
from ..utils.errors import InvalidParameter
from .robot import SimConfig, sample_input
from .systems import RobotSystem
from .world import World


@dataclass
class LabeledDataset:
    """
    Inputs with their robustness values and level labels.

    Attributes:
        inputs: Array of shape (N, d)
        rho: Robustness values of shape (N,)
        labels: 0-based level indices of shape (N,)
        m: Number of levels
    """
    inputs: np.ndarray
    rho: np.ndarray
    labels: np.ndarray
    m: int

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        if self.inputs.ndim == 1:
            self.inputs = self.inputs[:, None]
        self.rho = np.asarray(self.rho, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if not (len(self.inputs) == len(self.rho) == len(self.labels)):
            raise InvalidParameter("inputs, rho and labels must have equal length")
        if len(self.labels) and (self.labels.min() < 0 or self.labels.max() >= self.m):
            raise InvalidParameter(f"Labels must lie in [0, {self.m - 1}]")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]

    def level_counts(self) -> np.ndarray:
        """N_l for every level."""
        return np.bincount(self.labels, minlength=self.m)

    def subset(self, level: int) -> np.ndarray:
        """Inputs X_l labeled with the given level."""
        return self.inputs[self.labels == level]

    @classmethod
    def from_values(cls, inputs: np.ndarray, rho: np.ndarray, levels: RobustnessLevels) -> 'LabeledDataset':
        rho = np.asarray(rho, dtype=float)
        return cls(inputs=inputs, rho=rho, labels=levels.classify_many(rho), m=levels.m)

    @classmethod
    def empty(cls, m: int, dim: int = 2) -> 'LabeledDataset':
        return cls(inputs=np.empty((0, dim)), rho=np.empty(0), labels=np.empty(0, dtype=int), m=m)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.inputs, columns=[f"x{k}" for k in range(self.dim)])
        frame['rho'] = self.rho
        frame['level'] = self.labels
        return frame

    def save_csv(self, filepath: str) -> None:
        """Save to CSV with 17 significant digits."""
        Path(filepath).parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(filepath, index=False, float_format="%.17g")
        logger.info(f"Saved {len(self)} samples to {filepath}")


def dataset_schema(m: int, dim: int = 2) -> pa.DataFrameSchema:
    """Validation schema of the dataset CSV."""
    finite = pa.Check(lambda s: np.isfinite(s), error="must be finite")
    columns = {f"x{k}": pa.Column(float, finite, coerce=True) for k in range(dim)}
    columns['rho'] = pa.Column(float, finite, coerce=True)
    columns['level'] = pa.Column(int, pa.Check.in_range(0, m - 1), coerce=True)
    return pa.DataFrameSchema(columns, strict=True, ordered=True)


def load_dataset(filepath: str, levels: Optional[RobustnessLevels] = None) -> LabeledDataset:
    """
    Load and validate a dataset CSV.

    Args:
        filepath: Path to CSV file
        levels: When given, labels are recomputed from rho and checked
            against the stored ones

    Returns:
        LabeledDataset
    """
    logger.info(f"Loading data from {filepath}")
    frame = pd.read_csv(filepath)
    dim = sum(1 for col in frame.columns if col.startswith('x'))
    m = levels.m if levels is not None else int(frame['level'].max()) + 1 if len(frame) else 1
    frame = dataset_schema(m, dim).validate(frame)

    inputs = frame[[f"x{k}" for k in range(dim)]].to_numpy()
    rho = frame['rho'].to_numpy()
    labels = frame['level'].to_numpy()
    if levels is not None:
        expected = levels.classify_many(rho)
        if np.any(expected != labels):
            raise InvalidParameter(f"Stored levels disagree with levels {levels} on {int(np.sum(expected != labels))} rows")
    logger.info(f"Loaded {len(frame)} rows")
    return LabeledDataset(inputs=inputs, rho=rho, labels=labels, m=m)


def label_inputs(system, inputs: np.ndarray, levels: RobustnessLevels, rng: Rng) -> LabeledDataset:
    """Run a system on given inputs and label the outcomes."""
    rho = system.robustness(inputs, rng)
    return LabeledDataset.from_values(inputs, rho, levels)


def generate_dataset(
    n: int,
    levels: RobustnessLevels,
    phi: Formula,
    rng: Rng,
    world: Optional[World] = None,
    config: Optional[SimConfig] = None
) -> LabeledDataset:
    """
    Generate N i.i.d. benchmark samples.

    Inputs come from ``sample_input``, trajectories from the robot simulation
    and labels from the robustness of ``phi``.

    Args:
        n: Number of samples (>= 1)
        levels: Robustness levels
        phi: Requirement formula
        rng: Random stream; inputs and dynamics use derived sub-streams
        world: Environment (default: shipped world file)
        config: Simulation config

    Returns:
        LabeledDataset of size n
    """
    if n < 1:
        raise InvalidParameter(f"Need at least one sample, got {n}")
    world = world or World.load()
    config = config or SimConfig()
    logger.info(f"Generating {n} benchmark samples...")

    inputs = sample_input(rng.derive("inputs"), n, config)
    dataset = label_inputs(RobotSystem(world, phi, config), inputs, levels, rng.derive("dynamics"))

    logger.info(f"Generated {n} samples, level counts {dataset.level_counts().tolist()}")
    return dataset


__all__ = ['LabeledDataset', 'dataset_schema', 'load_dataset', 'label_inputs', 'generate_dataset']
