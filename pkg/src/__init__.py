"""
Riskscope
=========

Distributional evaluation of black-box stochastic systems against a
real-valued requirement (robustness degree).

Modules:
    - numerics: Linear algebra, special functions, 1-D optimization, seeded RNG
    - stl: Signal temporal logic parser and quantitative semantics
    - simbench: Robot benchmark, dataset generation, truth proxy
    - lgp: Grid-discretized logistic Gaussian process density estimation
    - dirichlet: Dirichlet moments, credible bounds and sampling
    - dlgp: Dirichlet logistic Gaussian process estimator
    - baselines: DKDE and GDP comparison methods
    - evaluation: Evaluation indices and the repetition protocol
    - utils: Configuration, logging, errors
"""

__version__ = "1.0.0"

from loguru import logger
import sys

# Configure default logging
logger.remove()
logger.add(
    sys.stderr,
    format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan> - <level>{message}</level>",
    level="INFO"
)
