"""
Tests for Simulation Benchmark Module
"""

import pytest
import numpy as np
from scipy.stats import norm

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.dlgp import RobustnessLevels
from src.lgp import make_grid
from src.numerics import Rng
from src.simbench import (
    World, Area, SimConfig, sigmoid, sample_input, step, step_batch, simulate, simulate_batch,
    RobotSystem, SyntheticSystem, LabeledDataset, load_dataset, generate_dataset,
    TruthConfig, TruthField, level_ratio_field, build_truth_proxy
)
from src.stl import parse
from src.utils.errors import DegenerateTruth, InvalidParameter, InvalidState, OutOfRegion

GOAL_FORMULA = "F[0,10] (5 - max(abs(35 - y[0]), abs(5 - y[1])) > 0)"


@pytest.fixture(scope="module")
def world():
    return World.load()


@pytest.fixture(scope="module")
def levels():
    return RobustnessLevels.parse([-10.0, 0.0])


@pytest.fixture(scope="module")
def goal():
    return parse(GOAL_FORMULA)


def clipped_normal_mean(mu, sd, lo, hi):
    a, b = (lo - mu) / sd, (hi - mu) / sd
    return (
        lo * norm.cdf(a) + hi * norm.sf(b)
        + mu * (norm.cdf(b) - norm.cdf(a)) + sd * (norm.pdf(a) - norm.pdf(b))
    )


class TestWorld:
    """Test the world description."""

    def test_shipped_world(self, world):
        assert world.region == (0.0, 40.0, 0.0, 40.0)
        assert world.goal == (35.0, 5.0)
        assert len(world.obstacles) == 2
        names = {a.name for a in world.areas}
        assert names == set("ABCDEFG")

    def test_printed_areas(self, world):
        areas = {a.name: a for a in world.areas}
        assert (10.0, 15.0, 25.0, 30.0) in areas['E'].rects
        assert (20.0, 30.0, 0.0, 5.0) in areas['C'].rects

    def test_free_space_is_covered(self, world):
        """Every free point of the region lies in some area."""
        xs = np.linspace(0.05, 39.95, 120)
        points = np.array([(a, b) for a in xs for b in xs])
        free = points[~world.in_obstacle(points)]
        assert np.all(world.area_index(free) >= 0)

    def test_unknown_rule(self):
        with pytest.raises(InvalidParameter):
            World(areas=(Area('Z', 'Z', ((0.0, 1.0, 0.0, 1.0),)),))

    def test_round_trip_and_hash(self, world):
        again = World.from_dict(world.to_dict())
        assert again.geometry_hash() == world.geometry_hash()

    def test_bad_version(self, world):
        payload = dict(world.to_dict(), version=99)
        with pytest.raises(InvalidParameter):
            World.from_dict(payload)


class TestSampleInput:
    """Test the input sampler."""

    def test_inside_region(self):
        x = sample_input(Rng(0), 50_000)
        assert x.shape == (50_000, 2)
        assert np.all((x >= 0.0) & (x <= 10.0))
        # clipping puts mass exactly on the edges
        assert np.any(x == 0.0) and np.any(x == 10.0)

    def test_single_point(self):
        assert sample_input(Rng(1)).shape == (2,)

    def test_mean_matches_clipped_mixture(self):
        x = sample_input(Rng(2), 1_000_000)
        expected = [
            0.5 * clipped_normal_mean(1.0, np.sqrt(2.0), 0, 10) + 0.5 * clipped_normal_mean(5.0, np.sqrt(10.0), 0, 10),
            0.5 * clipped_normal_mean(5.0, np.sqrt(10.0), 0, 10) + 0.5 * clipped_normal_mean(1.0, np.sqrt(2.0), 0, 10),
        ]
        np.testing.assert_allclose(x.mean(axis=0), expected, atol=0.01)


class TestDynamics:
    """Test the robot motion rules."""

    def test_sigmoid_variants(self):
        assert sigmoid(0.0) == pytest.approx(0.5)
        assert sigmoid(2.0) == pytest.approx(1.0 / (1.0 + np.exp(2.0)))
        assert sigmoid(2.0, "conventional") == pytest.approx(1.0 / (1.0 + np.exp(-2.0)))

    def test_area_a_on_diagonal(self, world):
        starts = np.tile([5.0, 5.0], (40_000, 1))
        moved = step_batch(starts, Rng(3), world) - starts
        upward = np.mean(moved[:, 1] > 0)
        assert upward == pytest.approx(0.5, abs=0.01)
        assert np.all((moved[:, 0] == 0) | (moved[:, 1] == 0))

    def test_area_c_stays(self, world):
        starts = np.tile([25.0, 2.5], (100_000, 1))
        moved = step_batch(starts, Rng(4), world)
        stayed = np.all(moved == starts, axis=1)
        assert stayed.mean() == pytest.approx(0.7, abs=0.01)
        assert np.all(moved[~stayed, 1] == 2.5)

    def test_area_e_stays(self, world):
        starts = np.tile([12.5, 27.5], (100_000, 1))
        stayed = np.all(step_batch(starts, Rng(5), world) == starts, axis=1)
        assert stayed.mean() == pytest.approx(0.1, abs=0.01)

    def test_wall_is_never_crossed(self):
        box = World(region=(0.0, 10.0, 0.0, 10.0), areas=(Area('A', 'A', ((0.0, 10.0, 0.0, 10.0),)),))
        starts = np.tile([5.0, 9.9], (2000, 1))
        nxt = step_batch(starts, Rng(6), box)
        assert np.all(box.in_region(nxt))

    def test_start_in_obstacle(self, world):
        with pytest.raises(InvalidState):
            step(np.array([15.0, 15.0]), Rng(0), world)

    def test_signal_shape(self, world):
        x = np.array([3.0, 4.0])
        y = simulate(x, Rng(7), world)
        assert len(y) == 101
        np.testing.assert_allclose(y.times[-1], 10.0)
        np.testing.assert_array_equal(y.values[0], x)

    def test_area_f_moves_right(self, world):
        y = simulate(np.array([12.0, 22.5]), Rng(8), world)
        moves = np.diff(y.values[:11], axis=0)
        assert np.all(moves[:, 1] == 0.0)
        assert np.all((moves[:, 0] >= 0.3) & (moves[:, 0] <= 0.8))

    def test_trajectories_stay_in_free_space(self, world):
        starts = sample_input(Rng(9), 1000)
        traj = simulate_batch(starts, Rng(10), world)
        points = traj.reshape(-1, 2)
        assert np.all(world.in_region(points))
        assert not np.any(world.in_obstacle(points))

        steps = np.linalg.norm(np.diff(traj, axis=1), axis=2).ravel()
        moving = steps[steps > 0]
        assert np.all((moving >= 0.3 - 1e-9) & (moving <= 0.8 + 1e-9))

    def test_config_validation(self):
        with pytest.raises(InvalidParameter):
            SimConfig(dt=0.0)
        with pytest.raises(InvalidParameter):
            SimConfig(horizon=10.05)
        with pytest.raises(InvalidParameter):
            SimConfig(sigmoid="logistic")


class TestDataset:
    """Test dataset generation and files."""

    def test_generate(self, world, levels, goal):
        dataset = generate_dataset(500, levels, goal, Rng(11), world)
        assert len(dataset) == 500
        assert dataset.level_counts().sum() == 500
        np.testing.assert_array_equal(dataset.labels, levels.classify_many(dataset.rho))

    def test_deterministic(self, world, levels, goal):
        a = generate_dataset(50, levels, goal, Rng(12), world)
        b = generate_dataset(50, levels, goal, Rng(12), world)
        np.testing.assert_array_equal(a.inputs, b.inputs)
        np.testing.assert_array_equal(a.rho, b.rho)

    def test_csv_round_trip(self, tmp_path, world, levels, goal):
        dataset = generate_dataset(40, levels, goal, Rng(13), world)
        path = tmp_path / "data.csv"
        dataset.save_csv(str(path))
        assert path.read_text().splitlines()[0] == "x0,x1,rho,level"
        loaded = load_dataset(str(path), levels)
        np.testing.assert_array_equal(loaded.inputs, dataset.inputs)
        np.testing.assert_array_equal(loaded.rho, dataset.rho)
        np.testing.assert_array_equal(loaded.labels, dataset.labels)

    def test_inconsistent_levels_rejected(self, tmp_path, world, levels, goal):
        dataset = generate_dataset(40, levels, goal, Rng(14), world)
        path = tmp_path / "data.csv"
        dataset.save_csv(str(path))
        with pytest.raises(InvalidParameter):
            load_dataset(str(path), RobustnessLevels.parse([-30.0, -20.0]))

    def test_invalid_size(self, world, levels, goal):
        with pytest.raises(InvalidParameter):
            generate_dataset(0, levels, goal, Rng(0), world)

    def test_label_range_checked(self):
        with pytest.raises(InvalidParameter):
            LabeledDataset(inputs=np.zeros((1, 2)), rho=np.zeros(1), labels=np.array([3]), m=3)


class TestTruthProxy:
    """Test the ground-truth proxy."""

    @pytest.fixture
    def grid(self):
        return make_grid(([0.0, 0.0], [10.0, 10.0]), 1.0)

    def test_rows_on_simplex(self, grid, levels):
        system = SyntheticSystem(lambda x: np.column_stack([
            x[:, 0] / 20.0, 0.5 - x[:, 0] / 20.0, np.full(len(x), 0.5)
        ]), levels)
        truth = build_truth_proxy(5000, 0.3, levels, None, Rng(15), grid=grid, system=system)
        assert truth.pi.shape == (grid.n_cells, 3)
        np.testing.assert_allclose(truth.pi.sum(axis=1), 1.0)

    @pytest.mark.slow
    def test_constant_system_recovered(self, grid, levels):
        pi = np.array([0.2, 0.3, 0.5])
        system = SyntheticSystem.constant(pi, levels)
        truth = build_truth_proxy(100_000, 1.0, levels, None, Rng(16), grid=grid, system=system)
        interior = np.all((grid.centers > 2.0) & (grid.centers < 8.0), axis=1)
        assert np.max(np.abs(truth.pi[interior] - pi)) < 0.05

    def test_degenerate_level(self, grid, levels):
        system = SyntheticSystem.constant([0.5, 0.5, 0.0], levels)
        with pytest.raises(DegenerateTruth):
            build_truth_proxy(2000, 0.5, levels, None, Rng(17), grid=grid, system=system)

    def test_ratio_follows_nearby_samples(self):
        samples = LabeledDataset(
            inputs=np.array([[0.0, 0.0], [10.0, 10.0]]), rho=np.array([-1.0, 1.0]),
            labels=np.array([0, 1]), m=2
        )
        pi = level_ratio_field(samples, np.array([[0.5, 0.5], [9.5, 9.5]]), 1.0)
        assert pi[0, 0] > 0.99 and pi[1, 1] > 0.99

    def test_save_load(self, tmp_path, grid, levels):
        system = SyntheticSystem.constant([0.2, 0.3, 0.5], levels)
        truth = build_truth_proxy(3000, 0.5, levels, None, Rng(18), grid=grid, system=system)
        path = tmp_path / "truth.json"
        truth.save(str(path))
        loaded = TruthField.load(str(path))
        assert loaded.grid == grid
        np.testing.assert_allclose(loaded.pi, truth.pi)
        np.testing.assert_allclose(loaded.at(np.array([[0.2, 0.2]])), truth.pi[:1])
        with pytest.raises(OutOfRegion):
            loaded.at(np.array([[11.0, 0.0]]))

    def test_robot_samples_cached(self, tmp_path, grid, world):
        phi = parse("y[0] > 5")
        two = RobustnessLevels.parse([0.0])
        first = build_truth_proxy(300, 0.5, two, phi, Rng(19), grid=grid, world=world, cache_dir=str(tmp_path))
        assert len(list(tmp_path.glob("truth_*.npz"))) == 1
        second = build_truth_proxy(300, 0.5, two, phi, Rng(19), grid=grid, world=world, cache_dir=str(tmp_path))
        np.testing.assert_array_equal(first.pi, second.pi)

    def test_config(self):
        config = TruthConfig.from_dict({'n_samples': 5000, 'unknown': 1})
        assert config.n_samples == 5000
        with pytest.raises(InvalidParameter):
            TruthConfig(bandwidth=0.0)

    def test_robot_system(self, world, goal):
        system = RobotSystem(world, goal)
        rho = system.robustness(np.array([[1.0, 5.0], [9.0, 1.0]]), Rng(20))
        assert rho.shape == (2,)
        assert np.all(np.isfinite(rho))


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
