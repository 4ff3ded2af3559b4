#!/usr/bin/env python3
"""
Riskscope
=========

Command-line entry point.

Usage:
    python main.py simulate --n 500 --seed 1 --levels=-10,0 --out data/data.csv
    python main.py truth --m 20000 --bandwidth 0.01 --seed 1 --out data/truth.json
    python main.py fit --method dlgp --lambda opt --data data/data.csv --grid-width 0.5 --out models/dlgp.json
    python main.py query --model models/dlgp.json --x "3.5,7.0" --beta 0.05
    python main.py evaluate --models models/dlgp.json,models/gdp.json --truth data/truth.json --out reports/report.json
    python main.py experiment --config configs/experiment.yaml

Negative level boundaries need the ``--levels=-10,0`` form.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
from dotenv import load_dotenv
from loguru import logger

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from src.baselines import GdpConfig, dkde_fit, gdp_fit
from src.dlgp import DlgpConfig, RobustnessLevels, fit as dlgp_fit
from src.evaluation import (
    ExperimentConfig, ExperimentRunner, ModelFields, ReportWriter, evaluate_models, load_model, save_model
)
from src.lgp import make_grid
from src.numerics import Rng
from src.simbench import (
    SimConfig, TruthConfig, TruthField, World, build_truth_proxy, generate_dataset, load_dataset
)
from src.stl import load_formula, parse
from src.utils import RiskscopeError, load_config, setup_logging

DEFAULT_CONFIG = Path(__file__).parent / "config.yaml"


def _levels(args, config: Dict[str, Any]) -> RobustnessLevels:
    if getattr(args, 'levels', None):
        return RobustnessLevels.parse(args.levels)
    return RobustnessLevels.parse(config.get('levels', {}).get('boundaries', [-10.0, 0.0]))


def _formula(args, config: Dict[str, Any]):
    if getattr(args, 'formula', None):
        return load_formula(args.formula)
    return parse(config.get('formula', {}).get('text'))


def _world(args, config: Dict[str, Any]) -> World:
    path = getattr(args, 'world', None) or config.get('simulation', {}).get('world_file')
    if not path:
        return World.load()
    if not Path(path).exists():
        # relative paths in config.yaml refer to the project root
        path = Path(__file__).parent / path
    return World.load(str(path))


def _sim_config(config: Dict[str, Any]) -> SimConfig:
    sim = {k: v for k, v in config.get('simulation', {}).items() if k != 'world_file'}
    return SimConfig.from_dict(sim)


def simulate(args, config: Dict[str, Any]) -> None:
    """Generate a labeled benchmark dataset."""
    levels = _levels(args, config)
    dataset = generate_dataset(
        args.n, levels, _formula(args, config), Rng(args.seed), _world(args, config), _sim_config(config)
    )
    dataset.save_csv(args.out)


def truth(args, config: Dict[str, Any]) -> None:
    """Build the ground-truth proxy field."""
    levels = _levels(args, config)
    sim_config = _sim_config(config)
    truth_config = TruthConfig.from_dict(dict(config.get('truth', {}), n_samples=args.m, bandwidth=args.bandwidth, seed=args.seed))
    grid_width = args.grid_width or config.get('lgp', {}).get('grid_width', 0.5)
    truth_field = build_truth_proxy(
        truth_config.n_samples, truth_config.bandwidth, levels, _formula(args, config), Rng(truth_config.seed),
        grid=make_grid(sim_config.input_region, grid_width), world=_world(args, config),
        config=sim_config, cache_dir=args.cache_dir or truth_config.cache_dir,
    )
    truth_field.save(args.out)


def fit(args, config: Dict[str, Any]) -> None:
    """Fit one estimator on a dataset file."""
    levels = _levels(args, config)
    dataset = load_dataset(args.data, levels)
    lgp_section = dict(config.get('lgp', {}))
    if args.grid_width:
        lgp_section['grid_width'] = args.grid_width
    region = _sim_config(config).input_region

    if args.method == 'dlgp':
        section = dict(config.get('dlgp', {}), lam=args.lam)
        if args.seed is not None:
            section['seed'] = args.seed
        model = dlgp_fit(dataset, levels, region, DlgpConfig.from_dict(section, lgp_section))
    elif args.method == 'dkde':
        model = dkde_fit(dataset, levels, config.get('dlgp', {}).get('alpha_prior'))
    else:
        section = dict(config.get('baselines', {}).get('gdp', {}))
        if args.seed is not None:
            section['seed'] = args.seed
        model = gdp_fit(dataset, levels, GdpConfig.from_dict(section))
    save_model(model, args.out)


def query(args, config: Dict[str, Any]) -> Dict[str, Any]:
    """Answer a query at one input and print it as JSON."""
    model = load_model(args.model)
    x = np.array([float(v) for v in args.x.split(',')])
    beta = args.beta if args.beta is not None else config.get('evaluation', {}).get('beta', 0.05)
    result = model.query(x, beta).to_dict()
    print(json.dumps(result, indent=2, sort_keys=True))
    return result


def evaluate(args, config: Dict[str, Any]) -> None:
    """Evaluate fitted models against a truth field."""
    truth_field = TruthField.load(args.truth)
    models = {}
    for path in args.models.split(','):
        model = load_model(path)
        label = Path(path).stem
        models[label] = model
    dataset = load_dataset(args.data, _levels(args, config)) if args.data else None
    beta = args.beta if args.beta is not None else config.get('evaluation', {}).get('beta', 0.05)
    report = evaluate_models(models, truth_field, beta, dataset)

    out = Path(args.out)
    writer = ReportWriter(str(out.parent))
    writer.save(report, out.name)
    if args.plots_dir:
        plots = ReportWriter(args.plots_dir)
        plots.plot_indices(report)
        fields = {label: ModelFields.from_model(model, truth_field.grid, beta) for label, model in models.items()}
        plots.plot_fields(truth_field.grid, fields)


def experiment(args, config: Dict[str, Any]) -> None:
    """Run the repeated evaluation protocol."""
    payload = load_config(args.config) if args.config else dict(config.get('evaluation', {}))
    exp_config = ExperimentConfig.from_dict(payload)
    runner = ExperimentRunner(exp_config)
    report = runner.run()

    writer = ReportWriter(args.out_dir)
    writer.save(report, f"{exp_config.name}.json")
    if not args.no_plots:
        writer.plot_indices(report, f"{exp_config.name}_indices.png")
        if runner.sample_fields:
            writer.plot_fields(runner.grid, runner.sample_fields, f"{exp_config.name}_bands.png")

    summary = report.aggregate()
    ind = summary[summary['metric'] == 'ind'].groupby('method')['mean'].mean()
    logger.info("=" * 60)
    logger.info(f"EXPERIMENT {exp_config.name} - mean Ind over non-empty bins")
    for method, value in ind.items():
        logger.info(f"  {method:<10} {value:.5f}")
    logger.info("=" * 60)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Dirichlet logistic GP evaluation of stochastic systems")
    parser.add_argument('--config', dest='app_config', default=str(DEFAULT_CONFIG), help='Defaults file (YAML)')
    parser.add_argument('--debug', action='store_true', help='Enable debug logging')
    parser.add_argument('--log-file', default=None, help='Also log to this file')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('simulate', help='Generate a labeled benchmark dataset')
    p.add_argument('--n', type=int, default=500, help='Number of samples')
    p.add_argument('--seed', type=int, default=0, help='Random seed')
    p.add_argument('--world', default=None, help='World description file')
    p.add_argument('--levels', default=None, help='Level boundaries, e.g. --levels=-10,0')
    p.add_argument('--formula', default=None, help='STL formula file')
    p.add_argument('--out', default='data/data.csv', help='Output CSV')
    p.set_defaults(handler=simulate)

    p = sub.add_parser('truth', help='Build the ground-truth proxy')
    p.add_argument('--m', type=int, default=20000, help='Number of uniform samples')
    p.add_argument('--bandwidth', type=float, default=0.01, help='KDE bandwidth')
    p.add_argument('--seed', type=int, default=0, help='Random seed')
    p.add_argument('--grid-width', type=float, default=None, help='Grid cell width')
    p.add_argument('--world', default=None, help='World description file')
    p.add_argument('--levels', default=None, help='Level boundaries, e.g. --levels=-10,0')
    p.add_argument('--formula', default=None, help='STL formula file')
    p.add_argument('--cache-dir', default=None, help='Sample cache directory')
    p.add_argument('--out', default='data/truth.json', help='Output JSON')
    p.set_defaults(handler=truth)

    p = sub.add_parser('fit', help='Fit an estimator')
    p.add_argument('--method', choices=['dlgp', 'dkde', 'gdp'], default='dlgp')
    p.add_argument('--lambda', dest='lam', default='opt', help="'opt' or a non-negative value")
    p.add_argument('--data', required=True, help='Dataset CSV')
    p.add_argument('--grid-width', type=float, default=None, help='Grid cell width')
    p.add_argument('--levels', default=None, help='Level boundaries, e.g. --levels=-10,0')
    p.add_argument('--seed', type=int, default=None, help='Random seed')
    p.add_argument('--out', default='models/model.json', help='Output model JSON')
    p.set_defaults(handler=fit)

    p = sub.add_parser('query', help='Query a fitted model at one input')
    p.add_argument('--model', required=True, help='Model JSON')
    p.add_argument('--x', required=True, help='Input as comma-separated coordinates')
    p.add_argument('--beta', type=float, default=None, help='Tail mass of the credible intervals')
    p.set_defaults(handler=query)

    p = sub.add_parser('evaluate', help='Evaluate fitted models against a truth field')
    p.add_argument('--models', required=True, help='Comma-separated model JSON files')
    p.add_argument('--truth', required=True, help='Truth field JSON')
    p.add_argument('--data', default=None, help='Training data CSV (for the no-sample ratio)')
    p.add_argument('--levels', default=None, help='Level boundaries, e.g. --levels=-10,0')
    p.add_argument('--beta', type=float, default=None, help='Tail mass of the credible intervals')
    p.add_argument('--out', default='reports/report.json', help='Output report JSON')
    p.add_argument('--plots-dir', default=None, help='Directory for plots')
    p.set_defaults(handler=evaluate)

    p = sub.add_parser('experiment', help='Run the repeated evaluation protocol')
    p.add_argument('--config', default=None, help='Experiment YAML')
    p.add_argument('--out-dir', default='reports', help='Output directory')
    p.add_argument('--no-plots', action='store_true', help='Skip plots')
    p.set_defaults(handler=experiment)
    return parser


def main(argv: Optional[list] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    config = load_config(args.app_config) if Path(args.app_config).exists() else {}
    level = "DEBUG" if args.debug else config.get('logging', {}).get('level', "INFO")
    setup_logging(level=level, log_file=args.log_file)

    try:
        args.handler(args, config)
    except RiskscopeError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
