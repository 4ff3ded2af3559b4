"""
Tests for DLGP Module
"""

import json

import pytest
import numpy as np

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.dirichlet import dir_cov, dir_mean, dirichlet_query
from src.dlgp import RobustnessLevels, LambdaPrior, DlgpModel, DlgpConfig, optimize_lambda, fit
from src.lgp import KernelParams, LgpConfig, LgpPosterior, make_grid
from src.numerics import Rng
from src.simbench import LabeledDataset, SyntheticSystem, label_inputs
from src.utils.errors import InvalidParameter, NonFinite, OutOfRegion
from src.utils.helpers import to_jsonable


def posterior(p_mean, p_std, n_level):
    p_mean = np.asarray(p_mean, dtype=float)
    return LgpPosterior(
        params=KernelParams(1.0, 1.0),
        mode=np.zeros_like(p_mean),
        factor=None,
        p_mean=p_mean,
        p_std=np.asarray(p_std, dtype=float),
        n_level=n_level,
    )


def hand_model(scale=1, alpha_prior=(0.5, 0.5), lam=0.0):
    """Two levels on two unit cells of [0, 2]."""
    return DlgpModel(
        levels=RobustnessLevels.parse("0"),
        grid=make_grid(([0.0], [2.0]), 1.0),
        posteriors=[
            posterior([0.02, 0.001], [0.005, 0.01], 10 * scale),
            posterior([0.3, 0.7], [0.1, 0.1], 5 * scale),
        ],
        alpha_prior=np.asarray(alpha_prior, dtype=float),
        lam=lam,
    )


def synthetic_dataset(n, pi, levels, seed):
    rng = Rng(seed)
    inputs = rng.generator.uniform(0.0, 10.0, size=(n, 2))
    return label_inputs(SyntheticSystem.constant(pi, levels), inputs, levels, rng.derive("labels"))


@pytest.fixture
def levels():
    return RobustnessLevels.parse("-10,0")


@pytest.fixture
def small_config():
    return DlgpConfig(lgp=LgpConfig(grid_width=2.5, draws=200, fixed_params=(1.0, 0.5)), seed=3)


class TestRobustnessLevels:
    """Test level classification."""

    def test_benchmark_levels(self, levels):
        assert levels.m == 3
        assert levels.classify(-10.0) == 0
        assert levels.classify(0.0) == 1
        assert levels.classify(0.001) == 2
        assert levels.classify(-1e9) == 0

    def test_classify_many(self, levels):
        np.testing.assert_array_equal(levels.classify_many([-20.0, -10.0, -5.0, 0.0, 3.0]), [0, 0, 1, 1, 2])

    def test_non_finite(self, levels):
        with pytest.raises(NonFinite):
            levels.classify(np.nan)

    @pytest.mark.parametrize("boundaries", [[0.0, 0.0], [1.0, -1.0], [0.0, np.inf]])
    def test_invalid_boundaries(self, boundaries):
        with pytest.raises(InvalidParameter):
            RobustnessLevels.parse(boundaries)

    def test_parse_and_str(self, levels):
        assert levels.to_list() == [-10.0, 0.0]
        assert str(levels) == "(-inf, -10], (-10, 0], (0, inf)"
        assert RobustnessLevels.parse(levels.to_list()) == levels


class TestLambdaPrior:
    """Test the Gamma prior on lambda."""

    def test_default_mode_and_variance(self):
        prior = LambdaPrior()
        assert prior.mode == pytest.approx(2.0)
        assert prior.variance == pytest.approx(3.0)

    def test_from_mode_variance(self):
        prior = LambdaPrior.from_mode_variance(2.0, 3.0)
        assert prior.shape == pytest.approx(3.0)
        assert prior.scale == pytest.approx(1.0)

    def test_no_mode(self):
        with pytest.raises(InvalidParameter):
            LambdaPrior(shape=1.0)


class TestDlgpModel:
    """Test the assembled Dirichlet field."""

    def test_pseudo_count(self):
        model = hand_model()
        assert model.pseudo_count(np.array([0.5]), 1.0, 0) == pytest.approx(0.15)

    def test_pseudo_count_without_conservativeness(self):
        model = hand_model()
        assert model.pseudo_count(np.array([0.5]), 0.0, 0) == pytest.approx(10 * 0.02)

    def test_pseudo_count_clamped(self):
        model = hand_model()
        assert model.pseudo_count(np.array([1.5]), 1.0, 0) == 0.0

    def test_pseudo_count_out_of_region(self):
        with pytest.raises(OutOfRegion):
            hand_model().pseudo_count(np.array([2.5]), 1.0, 0)

    def test_negative_lambda(self):
        with pytest.raises(InvalidParameter):
            hand_model().pseudo_count(np.array([0.5]), -0.1, 0)

    def test_posterior_params_add_prior(self):
        model = hand_model()
        np.testing.assert_allclose(model.posterior_params(np.array([0.5]), 1.0), [0.65, 1.5])

    def test_prior_only_cell(self):
        model = hand_model(alpha_prior=(0.5, 0.5))
        np.testing.assert_allclose(model.posterior_params(np.array([0.5]), 100.0), [0.5, 0.5])
        result = model.with_lambda(100.0).query(np.array([0.5]))
        np.testing.assert_allclose(result.mean, [0.5, 0.5])

    def test_default_lambda_is_model_lambda(self):
        model = hand_model(lam=1.0)
        np.testing.assert_allclose(model.posterior_params(np.array([0.5])), [0.65, 1.5])

    def test_ratio_limit(self):
        model = hand_model(alpha_prior=(0.0, 0.0))
        mean = dir_mean(model.posterior_params(np.array([0.5]), 0.0))
        np.testing.assert_allclose(mean, [0.2 / 1.7, 1.5 / 1.7])

    def test_pseudo_counts_non_increasing_in_lambda(self):
        model = hand_model()
        lams = np.linspace(0.0, 10.0, 41)
        fields = np.stack([model.pseudo_count_field(lam) for lam in lams])
        assert np.all(np.diff(fields, axis=0) <= 1e-15)

    def test_band_non_decreasing_in_lambda(self):
        model = hand_model()
        bands = [model.with_lambda(lam).query(np.array([0.5])).band for lam in (0.0, 1.0, 2.0, 3.0)]
        assert all(b2 >= b1 for b1, b2 in zip(bands, bands[1:]))

    def test_band_shrinks_with_more_data(self):
        x = np.array([0.5])
        assert hand_model(scale=10).query(x).band < hand_model(scale=1).query(x).band

    def test_query_matches_dirichlet(self):
        model = hand_model(lam=1.0)
        x = np.array([[0.5], [1.5]])
        batch = model.query_many(x, 0.1)
        expected = dirichlet_query(model.posterior_params(x), 0.1)
        np.testing.assert_allclose(batch.band, expected.band)
        np.testing.assert_allclose(batch.mean.sum(axis=1), 1.0, atol=1e-12)

    def test_lambda_objective_uses_dirichlet_mean(self):
        model = hand_model()
        dataset = LabeledDataset(inputs=[[0.5], [1.5]], rho=[-1.0, 1.0], labels=[0, 1], m=2)
        lam = 0.7
        alpha = model.posterior_params(np.array([[0.5], [1.5]]), lam)
        expected = np.log(dir_mean(alpha[0])[0]) + np.log(dir_mean(alpha[1])[1]) + LambdaPrior().log_pdf(lam)
        assert model.lambda_objective(dataset, lam) == pytest.approx(expected)

    def test_empty_data_objective_is_prior(self):
        model = hand_model()
        empty = LabeledDataset.empty(m=2, dim=1)
        assert model.lambda_objective(empty, 1.3) == pytest.approx(LambdaPrior().log_pdf(1.3))
        assert optimize_lambda(model, empty) == pytest.approx(2.0, abs=1e-4)

    def test_optimized_lambda_beats_dense_grid(self):
        model = hand_model()
        dataset = LabeledDataset(
            inputs=[[0.5], [0.5], [0.5], [1.5], [1.5]], rho=[-1.0, 1.0, 1.0, 1.0, -1.0], labels=[0, 1, 1, 1, 0], m=2
        )
        lam = optimize_lambda(model, dataset, 10.0)
        grid_best = max(model.lambda_objective(dataset, value) for value in np.linspace(0.0, 10.0, 500))
        assert 0.0 <= lam <= 10.0
        assert model.lambda_objective(dataset, lam) >= grid_best - 1e-6

    def test_round_trip(self):
        model = hand_model(lam=1.25)
        payload = json.loads(json.dumps(to_jsonable(model.to_dict())))
        restored = DlgpModel.from_dict(payload)
        assert restored.lam == 1.25
        assert restored.levels == model.levels
        assert restored.grid == model.grid
        np.testing.assert_allclose(restored.posterior_field(), model.posterior_field())

    def test_unknown_schema(self):
        payload = hand_model().to_dict()
        payload['schema_version'] = 99
        with pytest.raises(InvalidParameter):
            DlgpModel.from_dict(payload)

    def test_mismatched_prior(self):
        with pytest.raises(InvalidParameter):
            hand_model(alpha_prior=(1.0, 1.0, 1.0))


class TestDlgpConfig:
    """Test fit settings."""

    def test_from_dict(self):
        config = DlgpConfig.from_dict({'lam': '1', 'seed': 4, 'unused': True}, {'grid_width': 1.0})
        assert config.lam == 1.0
        assert config.seed == 4
        assert config.lgp.grid_width == 1.0

    def test_negative_lambda(self):
        with pytest.raises(InvalidParameter):
            DlgpConfig(lam=-1.0)

    def test_prior_weights(self):
        np.testing.assert_allclose(DlgpConfig().prior_weights(3), [1 / 3] * 3)
        with pytest.raises(InvalidParameter):
            DlgpConfig(alpha_prior=[1.0, 1.0]).prior_weights(3)


class TestFit:
    """Test the end-to-end estimator."""

    def test_three_levels(self, levels, small_config):
        dataset = synthetic_dataset(300, [0.2, 0.3, 0.5], levels, seed=1)
        model = fit(dataset, levels, ([0.0, 0.0], [10.0, 10.0]), small_config)
        assert len(model.posteriors) == 3
        assert model.grid.n_cells == 16
        assert 0.0 <= model.lam <= small_config.lambda_max
        np.testing.assert_allclose(model.n_levels, dataset.level_counts())
        assert np.all(model.posterior_field() >= model.alpha_prior)

    def test_reproducible(self, levels, small_config):
        dataset = synthetic_dataset(200, [0.2, 0.3, 0.5], levels, seed=2)
        region = ([0.0, 0.0], [10.0, 10.0])
        first = json.dumps(to_jsonable(fit(dataset, levels, region, small_config).to_dict()), sort_keys=True)
        second = json.dumps(to_jsonable(fit(dataset, levels, region, small_config).to_dict()), sort_keys=True)
        assert first == second

    def test_fixed_lambda(self, levels):
        dataset = synthetic_dataset(100, [0.2, 0.3, 0.5], levels, seed=3)
        config = DlgpConfig(lgp=LgpConfig(grid_width=5.0, draws=100, fixed_params=(1.0, 0.5)), lam=1.0)
        model = fit(dataset, levels, ([0.0, 0.0], [10.0, 10.0]), config)
        assert model.lam == 1.0

    def test_empty_level(self, levels, small_config):
        dataset = synthetic_dataset(150, [0.5, 0.5, 0.0], levels, seed=4)
        model = fit(dataset, levels, ([0.0, 0.0], [10.0, 10.0]), small_config)
        assert model.posteriors[2].n_level == 0
        np.testing.assert_array_equal(model.pseudo_count_field()[:, 2], 0.0)
        np.testing.assert_allclose(model.posterior_field()[:, 2], 1 / 3)

    def test_level_mismatch(self, levels, small_config):
        dataset = synthetic_dataset(50, [0.5, 0.5], RobustnessLevels.parse("0"), seed=5)
        with pytest.raises(InvalidParameter):
            fit(dataset, levels, ([0.0, 0.0], [10.0, 10.0]), small_config)

    @pytest.mark.slow
    def test_converges_to_true_probabilities(self, levels):
        pi = np.array([0.2, 0.3, 0.5])
        config = DlgpConfig(lgp=LgpConfig(grid_width=2.5, draws=500, fixed_params=(1.0, 0.2)), lam=0.0)
        region = ([0.0, 0.0], [10.0, 10.0])
        errors, spreads = [], []
        for n in (200, 2000, 20000):
            model = fit(synthetic_dataset(n, pi, levels, seed=n), levels, region, config)
            alpha = model.posterior_field()
            errors.append(float(np.mean(np.linalg.norm(dir_mean(alpha) - pi, axis=1))))
            spreads.append(float(np.max(dir_cov(alpha))))
        assert errors[1] <= 1.1 * errors[0]
        assert errors[2] <= 1.1 * errors[1]
        assert spreads[0] > spreads[1] > spreads[2]
        assert errors[2] < 0.05


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
