"""
Experiment Protocol
===================

Repeated fit-and-evaluate runs of several estimators against a truth proxy.

Method names:
    dlgp:<lambda>   DLGP with a fixed lambda (e.g. dlgp:0, dlgp:1)
    dlgp:opt        DLGP with the MAP lambda
    dkde            KDE pseudo-count baseline
    gdp             GP Dirichlet baseline

All dlgp variants of one repetition share a single set of LGP fits.
"""

import time
from pathlib import Path
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm
from loguru import logger

from ..baselines import GdpConfig, dkde_fit, gdp_fit
from ..dlgp import DlgpConfig, RobustnessLevels, fit as dlgp_fit
from ..lgp import LgpConfig, make_grid
from ..numerics import Rng
from ..simbench import (
    SimConfig, TruthConfig, TruthField, World, build_truth_proxy, generate_dataset, load_dataset
)
from ..stl import load_formula, parse
from ..utils.errors import InvalidParameter
from ..utils.helpers import max_workers
from .indices import ModelFields, index_table, no_sample_ratio
from .report import EvalReport

DEFAULT_METHODS = ('dlgp:0', 'dlgp:opt', 'dlgp:1', 'dkde', 'gdp')
DEFAULT_FORMULA = "F[0,10] (5 - max(abs(35 - y[0]), abs(5 - y[1])) > 0)"
PROJECT_ROOT = Path(__file__).resolve().parents[2]


@dataclass
class ExperimentConfig:
    """Configuration of an evaluation experiment."""
    name: str = "benchmark"
    description: str = ""
    methods: Tuple[str, ...] = DEFAULT_METHODS
    repetitions: int = 20
    reseed: str = "inference"
    seed: int = 0
    n_samples: int = 500
    levels: Tuple[float, ...] = (-10.0, 0.0)
    beta: float = 0.05
    formula: str = DEFAULT_FORMULA
    formula_file: Optional[str] = None
    world_file: Optional[str] = None
    data_file: Optional[str] = None
    truth_file: Optional[str] = None
    record_timing: bool = False
    simulation: Dict[str, Any] = field(default_factory=dict)
    lgp: Dict[str, Any] = field(default_factory=dict)
    dlgp: Dict[str, Any] = field(default_factory=dict)
    gdp: Dict[str, Any] = field(default_factory=dict)
    truth: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.methods = tuple(self.methods)
        self.levels = tuple(self.levels)
        if self.reseed not in ("inference", "data"):
            raise InvalidParameter(f"reseed must be 'inference' or 'data', got {self.reseed!r}")
        if self.repetitions < 1:
            raise InvalidParameter(f"repetitions must be >= 1, got {self.repetitions}")
        for method in self.methods:
            parse_method(method)

    @classmethod
    def from_dict(cls, payload: Optional[Dict[str, Any]]) -> 'ExperimentConfig':
        payload = payload or {}
        unknown = set(payload) - set(cls.__dataclass_fields__)
        if unknown:
            logger.warning(f"Ignoring unknown experiment keys {sorted(unknown)}")
        return cls(**{k: v for k, v in payload.items() if k in cls.__dataclass_fields__})

    def to_dict(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


def parse_method(method: str) -> Tuple[str, Optional[Any]]:
    """Split 'dlgp:opt' into ('dlgp', 'opt'); other methods carry no argument."""
    kind, _, arg = method.partition(':')
    if kind == 'dlgp':
        if arg == 'opt':
            return kind, 'opt'
        try:
            lam = float(arg)
        except ValueError:
            raise InvalidParameter(f"Bad lambda in method {method!r}") from None
        if lam < 0:
            raise InvalidParameter(f"Negative lambda in method {method!r}")
        return kind, lam
    if kind in ('dkde', 'gdp') and not arg:
        return kind, None
    raise InvalidParameter(f"Unknown method {method!r}")


def resolve_path(path: str) -> str:
    """Existing paths as given; others relative to the project root."""
    return path if Path(path).exists() else str(PROJECT_ROOT / path)


def _sub_seed(rng: Rng, name: str) -> int:
    return int(rng.derive(name).generator.integers(0, 2**31 - 1))


class ExperimentRunner:
    """
    Runs the repeated evaluation protocol.

    After ``run``, ``sample_dataset`` and ``sample_fields`` hold the data and
    the per-method fields of repetition 0.

    Example:
        >>> runner = ExperimentRunner(ExperimentConfig(repetitions=5))
        >>> report = runner.run()
    """

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.levels = RobustnessLevels.parse(list(config.levels))
        self.sim_config = SimConfig.from_dict(config.simulation)
        self.lgp_config = LgpConfig.from_dict(config.lgp)
        self.region = self.sim_config.input_region
        self.grid = make_grid(self.region, self.lgp_config.grid_width, self.lgp_config.max_cells)
        self.rng = Rng(config.seed)
        # dataset and fields of repetition 0, for band maps
        self.sample_dataset = None
        self.sample_fields: Dict[str, ModelFields] = {}
        self._world = None
        self._phi = None

    @property
    def world(self) -> World:
        if self._world is None:
            self._world = World.load(resolve_path(self.config.world_file)) if self.config.world_file else World.load()
        return self._world

    @property
    def phi(self):
        if self._phi is None:
            self._phi = load_formula(resolve_path(self.config.formula_file)) if self.config.formula_file else parse(self.config.formula)
        return self._phi

    def dataset(self, rng: Rng):
        """Loaded dataset, or a freshly generated one."""
        if self.config.data_file:
            return load_dataset(resolve_path(self.config.data_file), self.levels)
        return generate_dataset(self.config.n_samples, self.levels, self.phi, rng, self.world, self.sim_config)

    def truth(self) -> TruthField:
        """Loaded truth proxy, or a freshly built one on the fit grid."""
        if self.config.truth_file:
            truth = TruthField.load(resolve_path(self.config.truth_file))
        else:
            truth_config = TruthConfig.from_dict(self.config.truth)
            truth = build_truth_proxy(
                truth_config.n_samples, truth_config.bandwidth, self.levels, self.phi,
                Rng(truth_config.seed), grid=self.grid, world=self.world, config=self.sim_config,
                cache_dir=truth_config.cache_dir,
            )
        if truth.grid != self.grid:
            raise InvalidParameter("Truth field grid does not match the fit grid")
        if truth.m != self.levels.m:
            raise InvalidParameter(f"Truth field has {truth.m} levels, expected {self.levels.m}")
        return truth

    def fit_methods(self, dataset, rng: Rng) -> Dict[str, Tuple[Any, float]]:
        """
        Fit every configured method on one dataset.

        Returns:
            Mapping method name -> (model or exception, seconds)
        """
        fitted = {}
        dlgp_base, dlgp_seconds = None, 0.0
        for method in self.config.methods:
            kind, arg = parse_method(method)
            start = time.perf_counter()
            try:
                if kind == 'dlgp':
                    if dlgp_base is None:
                        config = DlgpConfig.from_dict(dict(self.config.dlgp, lam='opt', seed=_sub_seed(rng, 'dlgp')), self.config.lgp)
                        dlgp_base = dlgp_fit(dataset, self.levels, self.region, config)
                        dlgp_seconds = time.perf_counter() - start
                    if isinstance(dlgp_base, Exception):
                        raise dlgp_base
                    model = dlgp_base if arg == 'opt' else dlgp_base.with_lambda(arg)
                    fitted[method] = (model, dlgp_seconds)
                    continue
                if kind == 'dkde':
                    alpha_prior = self.config.dlgp.get('alpha_prior')
                    model = dkde_fit(dataset, self.levels, alpha_prior)
                else:
                    config = GdpConfig.from_dict(dict(self.config.gdp, seed=_sub_seed(rng, 'gdp')))
                    model = gdp_fit(dataset, self.levels, config)
                fitted[method] = (model, time.perf_counter() - start)
            except Exception as e:
                logger.error(f"{method} failed: {e}")
                if kind == 'dlgp':
                    dlgp_base = e
                fitted[method] = (e, time.perf_counter() - start)
        return fitted

    def run_repetition(self, repetition: int, rng: Rng, shared_dataset, truth: TruthField) -> EvalReport:
        """Fit and evaluate every method once."""
        partial = EvalReport(name=self.config.name)
        try:
            dataset = shared_dataset if shared_dataset is not None else self.dataset(rng.derive("data"))
        except Exception as e:
            logger.error(f"Repetition {repetition}: dataset failed: {e}")
            for method in self.config.methods:
                partial.add_error(method, repetition, e)
            return partial

        empty_ratio = no_sample_ratio(dataset, self.grid)
        if repetition == 0:
            self.sample_dataset = dataset
        for method, (model, seconds) in self.fit_methods(dataset, rng).items():
            if isinstance(model, Exception):
                partial.add_error(method, repetition, model)
                continue
            fields = ModelFields.from_model(model, self.grid, self.config.beta)
            if repetition == 0:
                self.sample_fields[method] = fields
            partial.add_indices(method, repetition, index_table(fields, truth.pi))
            partial.add_scalar(method, repetition, 'no_sample_ratio', empty_ratio)
            if self.config.record_timing:
                partial.add_scalar(method, repetition, 'seconds', seconds)
        return partial

    def run(self) -> EvalReport:
        """Run all repetitions and assemble the report in repetition order."""
        config = self.config
        logger.info(f"Running experiment {config.name}: {config.repetitions} repetitions of {list(config.methods)}")
        truth = self.truth()
        shared = self.dataset(self.rng.derive("data")) if config.reseed == "inference" else None
        rep_rngs = self.rng.derive("repetitions").spawn(config.repetitions)

        with ThreadPoolExecutor(max_workers=max_workers()) as executor:
            futures = [
                executor.submit(self.run_repetition, r, rep_rngs[r], shared, truth)
                for r in range(config.repetitions)
            ]
            partials = [future.result() for future in tqdm(futures, desc="Repetitions")]

        report = EvalReport(name=config.name, config=config.to_dict())
        for partial in partials:
            report.rows.extend(partial.rows)
            report.errors.extend(partial.errors)
        logger.info(f"Experiment finished: {len(report.rows)} records, {len(report.errors)} failures")
        return report


def run_experiment(config: ExperimentConfig) -> EvalReport:
    """Run the protocol described by ``config``."""
    return ExperimentRunner(config).run()


def evaluate_models(
    models: Dict[str, Any],
    truth: TruthField,
    beta: float = 0.05,
    dataset=None,
    name: str = "evaluation"
) -> EvalReport:
    """
    Evaluate already fitted models against a truth field (repetition 0).

    Args:
        models: Mapping label -> fitted model
        truth: Truth proxy on the evaluation grid
        beta: Tail mass of the credible intervals
        dataset: Training data, for the no-sample ratio
        name: Report name
    """
    report = EvalReport(name=name, config={'beta': beta, 'models': sorted(models)})
    empty_ratio = no_sample_ratio(dataset, truth.grid) if dataset is not None else None
    for label, model in models.items():
        fields = ModelFields.from_model(model, truth.grid, beta)
        report.add_indices(label, 0, index_table(fields, truth.pi))
        if empty_ratio is not None:
            report.add_scalar(label, 0, 'no_sample_ratio', empty_ratio)
        logger.info(f"Evaluated {label}: mean band {float(np.mean(fields.band)):.3f}")
    return report


__all__ = [
    'DEFAULT_METHODS', 'ExperimentConfig', 'parse_method', 'ExperimentRunner',
    'run_experiment', 'evaluate_models'
]
