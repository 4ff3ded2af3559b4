"""
Baselines Module
================

Comparison estimators: DKDE (KDE pseudo-counts) and GDP (GP Dirichlet
classification by log-normal moment matching).
"""

from .kde import scott_bandwidth, log_kernel_sum, kde_density, BANDWIDTH_FLOOR
from .dkde import KdeModel, dkde_fit
from .gdp import GdpConfig, moment_matched_targets, select_params, GdpModel, gdp_fit

__all__ = [
    'scott_bandwidth', 'log_kernel_sum', 'kde_density', 'BANDWIDTH_FLOOR',
    'KdeModel', 'dkde_fit',
    'GdpConfig', 'moment_matched_targets', 'select_params', 'GdpModel', 'gdp_fit'
]
