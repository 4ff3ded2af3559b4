"""
DLGP Module
===========

Dirichlet logistic Gaussian process estimation of level probabilities.
"""

from .levels import RobustnessLevels
from .model import LambdaPrior, DlgpModel
from .estimator import DlgpConfig, optimize_lambda, fit

__all__ = ['RobustnessLevels', 'LambdaPrior', 'DlgpModel', 'DlgpConfig', 'optimize_lambda', 'fit']
