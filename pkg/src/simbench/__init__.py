"""
Simulation Benchmark Module
===========================

Stochastic robot benchmark, dataset generation and the ground-truth proxy.
"""

from .world import World, Area, DEFAULT_WORLD
from .robot import SimConfig, sigmoid, sample_input, step, step_batch, simulate, simulate_batch
from .systems import RobotSystem, SyntheticSystem
from .dataset import LabeledDataset, dataset_schema, load_dataset, label_inputs, generate_dataset
from .truth import TruthConfig, TruthField, level_ratio_field, build_truth_proxy

__all__ = [
    'World', 'Area', 'DEFAULT_WORLD',
    'SimConfig', 'sigmoid', 'sample_input', 'step', 'step_batch', 'simulate', 'simulate_batch',
    'RobotSystem', 'SyntheticSystem',
    'LabeledDataset', 'dataset_schema', 'load_dataset', 'label_inputs', 'generate_dataset',
    'TruthConfig', 'TruthField', 'level_ratio_field', 'build_truth_proxy'
]
