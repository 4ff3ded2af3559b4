"""
Tests for the Command-Line Interface
"""

import json

import pytest
import numpy as np

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

from main import build_parser, main
from src.evaluation import PLOTTING_AVAILABLE, load_model
from src.simbench import TruthField, load_dataset
from src.dlgp import RobustnessLevels


@pytest.fixture
def workspace(tmp_path):
    """Formula file with robustness x0 - 5 at time 0, so both levels of "--levels=0" occur."""
    formula = tmp_path / "half.stl"
    formula.write_text("# right half of the input region\ny[0] > 5\n")
    return tmp_path


class TestParser:
    """Test argument parsing."""

    def test_subcommands(self):
        parser = build_parser()
        args = parser.parse_args(['fit', '--data', 'data.csv', '--lambda', '1'])
        assert args.method == 'dlgp'
        assert args.lam == '1'

    def test_negative_levels(self):
        args = build_parser().parse_args(['simulate', '--levels=-10,0'])
        assert args.levels == '-10,0'

    def test_missing_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestPipeline:
    """Run simulate, truth, fit, query and evaluate end to end."""

    @pytest.fixture
    def pipeline(self, workspace):
        formula = str(workspace / "half.stl")
        data = str(workspace / "data.csv")
        truth = str(workspace / "truth.json")
        model = str(workspace / "model.json")
        assert main(['simulate', '--n', '40', '--seed', '1', '--levels=0', '--formula', formula, '--out', data]) == 0
        assert main([
            'truth', '--m', '400', '--bandwidth', '1.0', '--seed', '2', '--grid-width', '5',
            '--levels=0', '--formula', formula, '--cache-dir', str(workspace / "cache"), '--out', truth,
        ]) == 0
        assert main([
            'fit', '--method', 'dlgp', '--lambda', 'opt', '--data', data, '--grid-width', '5',
            '--levels=0', '--seed', '3', '--out', model,
        ]) == 0
        return {'data': data, 'truth': truth, 'model': model}

    def test_simulate_output(self, pipeline):
        dataset = load_dataset(pipeline['data'], RobustnessLevels.parse("0"))
        assert len(dataset) == 40
        np.testing.assert_allclose(dataset.rho, dataset.inputs[:, 0] - 5.0)

    def test_truth_output(self, pipeline):
        truth = TruthField.load(pipeline['truth'])
        assert truth.pi.shape == (4, 2)
        np.testing.assert_allclose(truth.pi.sum(axis=1), 1.0)

    def test_fit_output(self, pipeline):
        model = load_model(pipeline['model'])
        assert model.method == "dlgp"
        assert model.grid.n_cells == 4
        assert model.lam >= 0

    def test_query(self, pipeline, capsys):
        assert main(['query', '--model', pipeline['model'], '--x', '7.5,2.5', '--beta', '0.05']) == 0
        result = json.loads(capsys.readouterr().out)
        assert sum(result['mean']) == pytest.approx(1.0)
        assert 0.0 <= result['band'] <= 1.0

    def test_query_outside_region(self, pipeline):
        assert main(['query', '--model', pipeline['model'], '--x', '50,50']) == 1

    def test_evaluate(self, pipeline, workspace):
        other = str(workspace / "dkde.json")
        assert main(['fit', '--method', 'dkde', '--data', pipeline['data'], '--levels=0', '--out', other]) == 0
        report = workspace / "reports" / "report.json"
        assert main([
            'evaluate', '--models', f"{pipeline['model']},{other}", '--truth', pipeline['truth'],
            '--data', pipeline['data'], '--levels=0', '--out', str(report), '--plots-dir', str(workspace / "plots"),
        ]) == 0
        payload = json.loads(report.read_text())
        assert {row['method'] for row in payload['rows']} == {'model', 'dkde'}
        assert report.with_suffix('.csv').exists()
        if PLOTTING_AVAILABLE:
            assert (workspace / "plots" / "indices.png").exists()
            assert (workspace / "plots" / "bands.png").exists()


class TestExperimentCommand:
    """Run the experiment subcommand on a tiny configuration."""

    @pytest.fixture
    def tiny_config(self, workspace):
        config = workspace / "tiny.yaml"
        config.write_text(
            "name: tiny\n"
            "methods: ['dlgp:opt', 'dkde']\n"
            "repetitions: 1\n"
            "n_samples: 30\n"
            "levels: [0.0]\n"
            f"formula_file: '{workspace / 'half.stl'}'\n"
            "lgp:\n  grid_width: 5.0\n  draws: 50\n  fixed_params: [1.0, 0.5]\n"
            "truth:\n  n_samples: 300\n  bandwidth: 1.0\n"
            f"  cache_dir: '{workspace / 'cache'}'\n"
        )
        return config

    def test_experiment(self, workspace, tiny_config):
        out_dir = workspace / "reports"
        assert main(['experiment', '--config', str(tiny_config), '--out-dir', str(out_dir), '--no-plots']) == 0
        payload = json.loads((out_dir / "tiny.json").read_text())
        assert payload['errors'] == []
        assert {row['method'] for row in payload['rows']} == {'dlgp:opt', 'dkde'}

    def test_experiment_plots(self, workspace, tiny_config):
        out_dir = workspace / "reports"
        assert main(['experiment', '--config', str(tiny_config), '--out-dir', str(out_dir)]) == 0
        if PLOTTING_AVAILABLE:
            assert (out_dir / "tiny_indices.png").exists()
            assert (out_dir / "tiny_bands.png").exists()


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
