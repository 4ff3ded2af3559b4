"""
Tests for Logistic Gaussian Process Module
"""

import pytest
import numpy as np
from scipy.stats import beta as beta_dist
from hypothesis import given, settings
import hypothesis.strategies as st

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.lgp import (
    make_grid, bin_counts, KernelParams, kernel_matrix, log_likelihood, laplace_fit,
    HyperPrior, hyper_objective, hyper_map, densities_from_fields, density_moments,
    LaplaceInference, MetropolisInference, LgpConfig, LgpPosterior, fit_level
)
from src.lgp.kernel import squared_distances
from src.numerics import Rng
from src.simbench import LabeledDataset
from src.utils.errors import InvalidParameter, OutOfRegion, RiskscopeError, TooManyCells


@pytest.fixture
def line_grid():
    """Five unit cells on [0, 5]."""
    return make_grid(([0.0], [5.0]), 1.0)


@pytest.fixture
def line_kernel(line_grid):
    return kernel_matrix(line_grid.centers, KernelParams(1.0, 0.5))


def one_level(inputs):
    inputs = np.asarray(inputs, dtype=float)
    return LabeledDataset(inputs=inputs, rho=np.zeros(len(inputs)), labels=np.zeros(len(inputs), dtype=int), m=1)


class TestGrid:
    """Test grids and cell counts."""

    def test_benchmark_grid(self):
        grid = make_grid(([0.0, 0.0], [10.0, 10.0]), 0.5)
        assert grid.n_cells == 400
        assert grid.cell_area == pytest.approx(0.25)
        assert grid.centers.shape == (400, 2)
        np.testing.assert_allclose(grid.centers[0], [0.25, 0.25])
        np.testing.assert_allclose(grid.centers[1], [0.25, 0.75])

    def test_single_cell(self):
        grid = make_grid(([0.0], [1.0]), 1.0)
        assert grid.n_cells == 1
        np.testing.assert_allclose(grid.centers, [[0.5]])

    def test_uneven_extent_rounds_up(self):
        grid = make_grid(([0.0, 0.0], [1.0, 2.2]), 0.5)
        assert grid.shape == (2, 5)

    @pytest.mark.parametrize("width", [0.0, -1.0])
    def test_invalid_width(self, width):
        with pytest.raises(InvalidParameter):
            make_grid(([0.0], [1.0]), width)

    def test_too_many_cells(self):
        with pytest.raises(TooManyCells):
            make_grid(([0.0, 0.0], [10.0, 10.0]), 0.01)

    def test_empty_dataset(self):
        grid = make_grid(([0.0, 0.0], [10.0, 10.0]), 0.5)
        dataset = LabeledDataset.empty(3)
        counts = bin_counts(grid, dataset)
        assert counts.counts.shape == (3, 400)
        assert counts.counts.sum() == 0

    def test_one_point_per_cell(self):
        grid = make_grid(([0.0, 0.0], [10.0, 10.0]), 0.5)
        counts = bin_counts(grid, one_level(grid.centers))
        np.testing.assert_array_equal(counts.level(0), np.ones(400))

    def test_boundary_goes_to_lower_cell(self):
        grid = make_grid(([0.0, 0.0], [10.0, 10.0]), 0.5)
        assert grid.cell_index(np.array([[0.5, 0.0]]))[0] == 0
        assert grid.cell_index(np.array([[10.0, 10.0]]))[0] == 399

    def test_out_of_region(self):
        grid = make_grid(([0.0, 0.0], [10.0, 10.0]), 0.5)
        with pytest.raises(OutOfRegion):
            bin_counts(grid, one_level([[10.5, 1.0]]))

    def test_totals_match_histogram(self):
        grid = make_grid(([0.0, 0.0], [10.0, 10.0]), 0.5)
        gen = np.random.default_rng(0)
        labels = gen.integers(0, 3, 500)
        dataset = LabeledDataset(inputs=gen.uniform(0, 10, (500, 2)), rho=np.zeros(500), labels=labels, m=3)
        counts = bin_counts(grid, dataset)
        np.testing.assert_array_equal(counts.totals, np.bincount(labels, minlength=3))

    def test_grid_round_trip(self):
        grid = make_grid(([0.0, 0.0], [10.0, 10.0]), 0.5)
        assert type(grid).from_dict(grid.to_dict()) == grid


class TestKernel:
    """Test the squared-exponential kernel."""

    def test_values(self):
        points = np.array([[0.0, 0.0], [1.0, 1.0]])
        K = kernel_matrix(points, KernelParams(2.0, 0.5))
        np.testing.assert_allclose(K, [[2.0, 2.0 * np.exp(-1.0)], [2.0 * np.exp(-1.0), 2.0]])

    def test_length_scale(self):
        assert KernelParams(1.0, 0.5).length_scale == pytest.approx(1.0)

    @pytest.mark.parametrize("amplitude,inv_length", [(0.0, 1.0), (1.0, -1.0), (np.inf, 1.0)])
    def test_invalid(self, amplitude, inv_length):
        with pytest.raises(InvalidParameter):
            KernelParams(amplitude, inv_length)


class TestLogLikelihood:
    """Test the multinomial log-likelihood."""

    def test_constant_field(self):
        counts = np.array([3.0, 0.0, 5.0, 2.0])
        value, grad = log_likelihood(counts, np.full(4, 1.7))
        assert value == pytest.approx(-10.0 * np.log(4.0))
        np.testing.assert_allclose(grad, counts - 10.0 / 4.0)

    def test_zero_counts(self):
        value, grad = log_likelihood(np.zeros(5), np.arange(5.0))
        assert value == 0.0
        np.testing.assert_array_equal(grad, np.zeros(5))

    def test_finite_differences(self):
        gen = np.random.default_rng(1)
        counts = gen.integers(0, 10, 8).astype(float)
        f = gen.normal(size=8)
        _, grad = log_likelihood(counts, f)
        h = 1e-5
        numeric = np.array([
            (log_likelihood(counts, f + h * e)[0] - log_likelihood(counts, f - h * e)[0]) / (2 * h)
            for e in np.eye(8)
        ])
        np.testing.assert_allclose(grad, numeric, rtol=1e-6, atol=1e-8)

    def test_shape_mismatch(self):
        with pytest.raises(InvalidParameter):
            log_likelihood(np.zeros(3), np.zeros(4))


class TestLaplaceFit:
    """Test the Laplace approximation."""

    def test_zero_counts_recover_prior(self, line_kernel):
        fit = laplace_fit(line_kernel, np.zeros(5))
        np.testing.assert_array_equal(fit.mode, np.zeros(5))
        np.testing.assert_allclose(fit.cov, line_kernel, atol=1e-12)
        assert fit.log_marginal == pytest.approx(0.0)

    def test_mode_is_stationary(self, line_kernel):
        counts = np.array([4.0, 9.0, 15.0, 6.0, 1.0])
        fit = laplace_fit(line_kernel, counts)
        grad = counts - counts.sum() * np.exp(fit.mode) / np.exp(fit.mode).sum()
        stationarity = grad - np.linalg.solve(line_kernel, fit.mode)
        assert fit.gradient_norm < 1e-6
        assert np.linalg.norm(stationarity) < 1e-5

    def test_covariance_matches_direct_inverse(self, line_kernel):
        counts = np.array([2.0, 7.0, 3.0, 0.0, 8.0])
        fit = laplace_fit(line_kernel, counts)
        p = np.exp(fit.mode) / np.exp(fit.mode).sum()
        W = counts.sum() * (np.diag(p) - np.outer(p, p))
        direct = np.linalg.inv(np.linalg.inv(line_kernel) + W)
        np.testing.assert_allclose(fit.cov, direct, rtol=1e-6, atol=1e-9)

        factor = fit.factor
        np.testing.assert_allclose(factor @ factor.T, fit.cov, atol=1e-8)

    def test_log_marginal_matches_determinant_form(self, line_kernel):
        counts = np.array([1.0, 3.0, 12.0, 3.0, 1.0])
        fit = laplace_fit(line_kernel, counts)
        p = np.exp(fit.mode) / np.exp(fit.mode).sum()
        W = counts.sum() * (np.diag(p) - np.outer(p, p))
        value, _ = log_likelihood(counts, fit.mode)
        psi = value - 0.5 * fit.mode @ np.linalg.solve(line_kernel, fit.mode)
        _, logdet = np.linalg.slogdet(np.eye(5) + line_kernel @ W)
        assert fit.log_marginal == pytest.approx(psi - 0.5 * logdet, rel=1e-8, abs=1e-8)

    def test_objective_increases(self):
        grid = make_grid(([0.0, 0.0], [4.0, 4.0]), 0.5)
        K = kernel_matrix(grid.centers, KernelParams(3.0, 0.3))
        counts = np.random.default_rng(2).poisson(2.0, grid.n_cells).astype(float)
        fit = laplace_fit(K, counts)
        assert np.all(np.diff(fit.objective_trace) >= -1e-9)
        assert fit.iterations >= 1

    @settings(max_examples=25, deadline=None)
    @given(counts=st.lists(st.integers(min_value=0, max_value=30), min_size=5, max_size=5))
    def test_converges_for_any_counts(self, counts):
        K = kernel_matrix(np.arange(5.0)[:, None] + 0.5, KernelParams(1.0, 0.5))
        fit = laplace_fit(K, np.array(counts, dtype=float))
        assert fit.gradient_norm < 1e-3 * max(1, sum(counts))
        assert np.all(np.isfinite(fit.cov))


class TestHyperMap:
    """Test hyper-parameter selection."""

    def test_zero_counts_use_prior_mode(self, line_grid):
        prior = HyperPrior()
        params = hyper_map(line_grid.centers, np.zeros(5), prior)
        assert params == prior.mode()
        assert (params.amplitude, params.inv_length) == (1e-2, 1e-2)

    def test_beats_every_grid_point(self):
        grid = make_grid(([0.0], [4.0]), 0.5)
        counts = np.array([0.0, 1.0, 4.0, 9.0, 11.0, 6.0, 2.0, 0.0])
        prior = HyperPrior(grid_size=6)
        sqdist = squared_distances(grid.centers)
        params = hyper_map(grid.centers, counts, prior)
        best = hyper_objective(counts, params, prior, sqdist)
        for t1 in prior.search_axis():
            for t2 in prior.search_axis():
                try:
                    score = hyper_objective(counts, KernelParams(t1, t2), prior, sqdist)
                except RiskscopeError:
                    continue
                assert best >= score - 1e-9
        low, high = prior.bounds
        assert low <= params.amplitude <= high and low <= params.inv_length <= high

    def test_deterministic(self, line_grid):
        counts = np.array([1.0, 5.0, 8.0, 2.0, 0.0])
        prior = HyperPrior(grid_size=5)
        assert hyper_map(line_grid.centers, counts, prior) == hyper_map(line_grid.centers, counts, prior)

    def test_prior_log_pdf(self):
        prior = HyperPrior()
        expected = 2 * (0.5 * np.log(2 / np.pi) - 0.5)
        assert prior.log_pdf(KernelParams(1.0, 1.0)) == pytest.approx(expected)


class TestDensityMoments:
    """Test Monte Carlo density moments."""

    def test_normalised(self, line_grid, line_kernel):
        fit = laplace_fit(line_kernel, np.array([3.0, 1.0, 0.0, 2.0, 6.0]))
        p_mean, p_std = density_moments(fit.mode, fit.factor, line_grid.cell_area, 2000, Rng(0))
        assert np.sum(p_mean) * line_grid.cell_area == pytest.approx(1.0, abs=1e-6)
        assert np.all(p_mean >= 0) and np.all(p_std >= 0)

    def test_forced_zero_covariance(self):
        mode = np.array([0.0, 1.0, 2.0])
        p_mean, p_std = density_moments(mode, np.zeros((3, 3)), 0.5, 100, Rng(0))
        np.testing.assert_allclose(p_mean, np.exp(mode) / np.exp(mode).sum() / 0.5)
        np.testing.assert_array_equal(p_std, 0.0)

    def test_shift_invariance(self, line_kernel):
        fit = laplace_fit(line_kernel, np.array([2.0, 2.0, 5.0, 1.0, 0.0]))
        a = density_moments(fit.mode, fit.factor, 1.0, 500, Rng(3))
        b = density_moments(fit.mode + 4.2, fit.factor, 1.0, 500, Rng(3))
        np.testing.assert_allclose(a[0], b[0], rtol=1e-9)
        np.testing.assert_allclose(a[1], b[1], rtol=1e-7, atol=1e-12)

    def test_reproducible(self, line_kernel):
        fit = laplace_fit(line_kernel, np.array([2.0, 2.0, 5.0, 1.0, 0.0]))
        a = density_moments(fit.mode, fit.factor, 1.0, 700, Rng(4))
        b = density_moments(fit.mode, fit.factor, 1.0, 700, Rng(4))
        np.testing.assert_array_equal(a[0], b[0])

    def test_draw_count_converges(self):
        grid = make_grid(([0.0, 0.0], [3.0, 3.0]), 0.5)
        K = kernel_matrix(grid.centers, KernelParams(1.0, 0.5))
        counts = np.random.default_rng(5).poisson(20.0, grid.n_cells).astype(float)
        fit = laplace_fit(K, counts)
        coarse, _ = density_moments(fit.mode, fit.factor, grid.cell_area, 2000, Rng(6))
        fine, _ = density_moments(fit.mode, fit.factor, grid.cell_area, 100_000, Rng(7))
        assert np.max(np.abs(coarse - fine)) / np.max(fine) < 0.02

    def test_too_few_draws(self):
        with pytest.raises(InvalidParameter):
            density_moments(np.zeros(3), np.eye(3), 1.0, 1, Rng(0))

    def test_densities_from_fields(self):
        dens = densities_from_fields(np.array([[0.0, 0.0], [0.0, np.log(3.0)]]), 0.5)
        np.testing.assert_allclose(dens, [[1.0, 1.0], [0.5, 1.5]])


class TestFitLevel:
    """Test per-level posterior fits."""

    def test_zero_data_keeps_uncertainty(self, line_grid):
        config = LgpConfig(grid_width=1.0, fixed_params=(1.0, 0.5), draws=500)
        posterior = fit_level(line_grid, np.zeros(5), config, Rng(0))
        assert posterior.n_level == 0
        assert np.all(posterior.p_std > 0)
        assert np.sum(posterior.p_mean) * line_grid.cell_area == pytest.approx(1.0, abs=1e-6)

    def test_fit_with_search(self, line_grid):
        config = LgpConfig(grid_width=1.0, draws=300, search_size=4, refine=False)
        posterior = fit_level(line_grid, np.array([0.0, 2.0, 7.0, 3.0, 1.0]), config, Rng(1))
        assert posterior.n_level == 13
        assert posterior.inference == "laplace"
        assert int(np.argmax(posterior.p_mean)) == 2

    def test_metropolis_strategy(self, line_grid):
        config = LgpConfig(grid_width=1.0, fixed_params=(1.0, 0.5), inference="metropolis", mcmc_steps=3000)
        posterior = fit_level(line_grid, np.array([1.0, 3.0, 4.0, 2.0, 0.0]), config, Rng(2))
        assert posterior.inference == "metropolis"
        assert np.sum(posterior.p_mean) == pytest.approx(1.0, abs=1e-9)

    def test_round_trip(self, line_grid):
        config = LgpConfig(grid_width=1.0, fixed_params=(1.0, 0.5), draws=200)
        posterior = fit_level(line_grid, np.array([1.0, 0.0, 2.0, 0.0, 1.0]), config, Rng(3))
        again = LgpPosterior.from_dict(posterior.to_dict())
        assert again.params == posterior.params
        np.testing.assert_array_equal(again.p_mean, posterior.p_mean)
        assert LgpPosterior.from_dict(posterior.to_dict(include_factor=False)).factor is None

    def test_config_validation(self):
        with pytest.raises(InvalidParameter):
            LgpConfig(inference="nuts")
        assert isinstance(LgpConfig().strategy(), LaplaceInference)
        config = LgpConfig.from_dict({'search_bounds': [0.1, 10.0], 'unknown': 3})
        assert config.hyper_prior.bounds == (0.1, 10.0)

    @pytest.mark.slow
    def test_laplace_agrees_with_metropolis(self, line_kernel):
        counts = np.array([20.0, 40.0, 80.0, 40.0, 20.0])
        fit = laplace_fit(line_kernel, counts)
        laplace_mean, laplace_std = LaplaceInference(draws=50_000).moments(fit, line_kernel, counts, 1.0, Rng(8))
        chain = MetropolisInference(n_steps=1_000_000, thin=10)
        mcmc_mean, mcmc_std = chain.moments(fit, line_kernel, counts, 1.0, Rng(9))
        assert 0.1 < chain.acceptance_rate < 0.9
        np.testing.assert_allclose(laplace_mean, mcmc_mean, atol=0.02)
        np.testing.assert_allclose(laplace_std, mcmc_std, rtol=0.10)

    @pytest.mark.slow
    def test_error_shrinks_with_data(self):
        """Sup-norm error and mean spread decrease as N grows."""
        grid = make_grid(([0.0], [1.0]), 0.05)
        edges = np.linspace(0.0, 1.0, 21)
        truth = np.diff(beta_dist.cdf(edges, 2, 5)) / 0.05
        config = LgpConfig(grid_width=0.05, draws=1000, refine=False)
        errors, spreads = [], []
        for n in (100, 1000, 10000):
            x = beta_dist.rvs(2, 5, size=(n, 1), random_state=n)
            posterior = fit_level(grid, bin_counts(grid, one_level(x)).level(0), config, Rng(n))
            errors.append(np.max(np.abs(posterior.p_mean - truth)))
            spreads.append(np.mean(posterior.p_std))
        assert errors[1] <= 1.1 * errors[0] and errors[2] <= 1.1 * errors[1]
        assert spreads[1] <= 1.1 * spreads[0] and spreads[2] <= 1.1 * spreads[1]
        assert errors[2] < errors[0]


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
