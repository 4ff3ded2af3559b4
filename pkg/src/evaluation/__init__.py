"""
Evaluation Module
=================

Confidence-band fields, Ind/CredRatio indices, the repeated experiment
protocol, model artifacts and reports.
"""

from .indices import (
    BIN_CENTERS, band_bins, ModelFields, confidence_band_field,
    ind_index, cred_ratio, no_sample_ratio, index_table
)
from .report import EvalReport, ReportWriter, TIDY_SCHEMA, PLOTTING_AVAILABLE
from .artifacts import MODEL_TYPES, save_model, load_model
from .experiment import (
    DEFAULT_METHODS, ExperimentConfig, parse_method, ExperimentRunner, run_experiment, evaluate_models
)

__all__ = [
    'BIN_CENTERS', 'band_bins', 'ModelFields', 'confidence_band_field',
    'ind_index', 'cred_ratio', 'no_sample_ratio', 'index_table',
    'EvalReport', 'ReportWriter', 'TIDY_SCHEMA', 'PLOTTING_AVAILABLE',
    'MODEL_TYPES', 'save_model', 'load_model',
    'DEFAULT_METHODS', 'ExperimentConfig', 'parse_method', 'ExperimentRunner', 'run_experiment', 'evaluate_models'
]
