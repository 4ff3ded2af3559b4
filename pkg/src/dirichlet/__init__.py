"""
Dirichlet Module
================

Exact Dirichlet mathematics backing every model query.
"""

from .dirichlet import (
    dir_mean, dir_cov, marginal_credible, dir_sample, credible_bounds,
    QueryResult, QueryBatch, dirichlet_query
)

__all__ = [
    'dir_mean', 'dir_cov', 'marginal_credible', 'dir_sample', 'credible_bounds',
    'QueryResult', 'QueryBatch', 'dirichlet_query'
]
