"""
Logistic Gaussian Process Module
================================

Grid-discretised logistic Gaussian process density estimation per
robustness level.
"""

from .grid import Grid, make_grid, CellCounts, bin_counts
from .kernel import KernelParams, squared_distances, kernel_matrix
from .laplace import log_likelihood, LaplaceFit, laplace_fit
from .hyper import HyperPrior, hyper_objective, hyper_map
from .moments import densities_from_fields, sample_moments, density_moments
from .inference import InferenceStrategy, LaplaceInference
from .metropolis import MetropolisInference
from .posterior import LgpConfig, LgpPosterior, fit_level

__all__ = [
    'Grid', 'make_grid', 'CellCounts', 'bin_counts',
    'KernelParams', 'squared_distances', 'kernel_matrix',
    'log_likelihood', 'LaplaceFit', 'laplace_fit',
    'HyperPrior', 'hyper_objective', 'hyper_map',
    'densities_from_fields', 'sample_moments', 'density_moments',
    'InferenceStrategy', 'LaplaceInference', 'MetropolisInference',
    'LgpConfig', 'LgpPosterior', 'fit_level'
]
