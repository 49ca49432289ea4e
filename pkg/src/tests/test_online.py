"""
Tests de la adaptación en línea (match-or-spawn)
"""
import numpy as np
import pytest

from thermal_vbgmm.errors import InvalidInputError
from thermal_vbgmm.models.mixture import PointMixture
from thermal_vbgmm.models.pixel import MatchResult, PixelModel
from thermal_vbgmm.online.adaptation import (
    adapt,
    closest_component,
    novelty_density,
    spawn_component,
    update_matched,
)
from thermal_vbgmm.online.kernels import MixtureArrays, adapt_many


@pytest.fixture
def two_components():
    return PointMixture(weights=[0.5, 0.5], means=[16.0, 50.0], variances=[2.25, 4.0])


class TestClosestComponent:
    """Distancia de Mahalanobis al componente más cercano"""

    def test_single_component(self):
        mixture = PointMixture(weights=[1.0], means=[3.0], variances=[4.0])
        assert closest_component(mixture, 5.0) == (0, 1.0)

    def test_exact_mean_wins(self, two_components):
        assert closest_component(two_components, 50.0) == (1, 0.0)

    def test_tie_keeps_lowest_index(self):
        mixture = PointMixture(weights=[0.5, 0.5], means=[7.0, 7.0], variances=[1.0, 1.0])
        assert closest_component(mixture, 7.0)[0] == 0

    def test_worked_example(self, two_components):
        c, d = closest_component(two_components, 21.0)
        assert c == 0
        assert d == pytest.approx(5.0 / 1.5)


class TestNoveltyDensity:
    """Búsqueda exacta del semiancho óptimo"""

    def test_ten_neighbours_at_two(self):
        history = [1.9] * 5 + [-1.9] * 4 + [2.0] + [100.0] * 90
        eps, p = novelty_density(history, 100, 0.0, e_min=1e-3)
        assert eps == 2.0
        assert p == pytest.approx(0.025)

    def test_identical_history(self):
        eps, p = novelty_density([4.2], 1, 4.2, e_min=1e-3)
        assert eps == 1e-3
        assert p == pytest.approx(1.0 / (2 * 1e-3))

    def test_inclusive_count_on_ties(self):
        # las tres muestras a distancia 1 cuentan juntas
        eps, p = novelty_density([1.0, -1.0, 1.0, 50.0], 4, 0.0, e_min=1e-3)
        assert eps == 1.0
        assert p == pytest.approx(3 / (4 * 2.0))

    @staticmethod
    def _check_against_grid(seed, cases):
        rng = np.random.default_rng(seed)
        e_min = 1e-3
        for _ in range(cases):
            n = int(rng.integers(10, 201))
            history = rng.normal(0.0, rng.uniform(0.5, 5.0), n)
            x_new = float(rng.normal(0.0, 3.0))
            eps, p = novelty_density(history, n, x_new, e_min=e_min)

            dist = np.sort(np.abs(history - x_new))
            grid = np.linspace(e_min, max(dist[-1], e_min), 1_000_000)
            inside = np.searchsorted(dist, grid, side="right")
            best_grid = np.max(inside / (n * 2.0 * grid))
            assert p >= best_grid - 1e-9
            assert eps >= e_min

    def test_matches_fine_grid(self):
        self._check_against_grid(17, 50)

    @pytest.mark.slow
    def test_matches_fine_grid_full(self):
        """1000 historias contra la rejilla de 10^6 puntos"""
        self._check_against_grid(18, 1000)

    def test_rejects_empty_history(self):
        with pytest.raises(InvalidInputError):
            novelty_density([], 10, 0.0)


class TestUpdateMatched:
    """Actualización following-the-leader"""

    def test_worked_example(self):
        mixture = PointMixture(weights=[0.5, 0.5], means=[10.0, 30.0], variances=[1.0, 2.0])
        out = update_matched(mixture, 0, 12.0, 100)
        assert out.weights[0] == pytest.approx(0.505)
        assert out.weights[1] == pytest.approx(0.5 * (1 - 1 / 100))
        assert out.means[0] == pytest.approx(10.0 + 2.0 / 51.0)
        assert out.variances[0] == pytest.approx(1.0 + 50.0 * 4.0 / 51.0 ** 2 - 1.0 / 51.0)
        # el componente no dueño conserva media y varianza
        assert out.means[1] == 30.0
        assert out.variances[1] == 2.0
        assert out.n_components == 2

    def test_variance_floor(self):
        mixture = PointMixture(weights=[1.0], means=[0.0], variances=[1e-4])
        out = update_matched(mixture, 0, 0.0, 2, sigma2_floor=1e-4)
        assert out.variances[0] == 1e-4

    def test_rejects_bad_component(self, two_components):
        with pytest.raises(InvalidInputError):
            update_matched(two_components, 2, 0.0, 10)


class TestSpawnComponent:
    """Creación de componentes nuevos"""

    def test_worked_example(self, two_components):
        out = spawn_component(two_components, 21.0, 2.0, 100)
        assert out.n_components == 3
        assert out.weights[2] == pytest.approx(0.01)
        assert out.means[2] == 21.0
        assert out.variances[2] == pytest.approx(1.25)

    def test_negative_variance_is_floored(self, two_components):
        out = spawn_component(two_components, 21.0, 0.4, 100, sigma2_floor=1e-4)
        assert out.variances[2] == 1e-4

    def test_continuous_uniform_variant(self, two_components):
        out = spawn_component(two_components, 21.0, 2.0, 100, continuous_uniform=True)
        assert out.variances[2] == pytest.approx(16.0 / 12.0)

    def test_weight_rescaling(self):
        mixture = PointMixture(weights=[0.6, 0.4], means=[0.0, 5.0], variances=[1.0, 1.0])
        out = spawn_component(mixture, 9.0, 1.0, 10)
        np.testing.assert_allclose(out.weights, [0.54, 0.36, 0.1])
        assert out.weights.sum() == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_positive_epsilon(self, two_components):
        with pytest.raises(InvalidInputError):
            spawn_component(two_components, 1.0, 0.0, 10)


class TestAdapt:
    """Decisión completa sobre un PixelModel"""

    def test_match_keeps_component_count(self):
        history = np.linspace(0.0, 100.0, 50)
        model = PixelModel.from_history(PointMixture(weights=[1.0], means=[50.0], variances=[1.0]), history)
        result = adapt(model, 50.0)
        assert result.matched
        assert result.density >= result.novelty_density
        assert model.mixture.n_components == 1
        assert model.history()[-1] == 50.0
        assert model.history()[0] == history[1]

    def test_far_sample_spawns(self, two_components):
        rng = np.random.default_rng(3)
        history = np.concatenate([rng.normal(21.0, 1.0, 30), rng.normal(16.0, 1.5, 35), rng.normal(50.0, 2.0, 35)])
        model = PixelModel.from_history(two_components, history)
        result = adapt(model, 21.0)
        assert not result.matched
        assert isinstance(result, MatchResult)
        assert model.mixture.n_components == 3
        assert model.mixture.means[2] == 21.0
        assert model.mixture.weights.sum() == pytest.approx(1.0, abs=1e-9)

    def test_deterministic(self, two_components):
        history = np.random.default_rng(8).normal(30.0, 10.0, 40)
        a = PixelModel.from_history(two_components, history)
        b = PixelModel.from_history(two_components, history)
        for x in np.random.default_rng(9).normal(25.0, 8.0, 30):
            ra, rb = adapt(a, float(x)), adapt(b, float(x))
            assert ra == rb
        np.testing.assert_array_equal(a.mixture.weights, b.mixture.weights)
        np.testing.assert_array_equal(a.mixture.means, b.mixture.means)
        np.testing.assert_array_equal(a.mixture.variances, b.mixture.variances)

    def test_rejects_non_finite(self, two_components):
        model = PixelModel.from_history(two_components, [16.0, 50.0])
        with pytest.raises(InvalidInputError):
            adapt(model, float("nan"))


class TestAdaptMany:
    """Invariantes sobre muchos pasos de actualización vectorizados"""

    def test_invariants_over_many_updates(self, config):
        rng = np.random.default_rng(21)
        pixels, n = 100, 40
        history = rng.normal(295.0, rng.uniform(0.1, 3.0, (pixels, 1)), (pixels, n))
        state = MixtureArrays.from_mixtures(
            [PointMixture(weights=[1.0], means=[history[p].mean()], variances=[history[p].var()]) for p in range(pixels)]
        )
        head = 0
        for step in range(100):
            x = rng.normal(295.0 + 5.0 * (step % 10 == 0), 1.0, pixels)
            before = state.counts.copy()
            decision = adapt_many(state, history, x, n, config)
            np.testing.assert_allclose(state.weights.sum(axis=1), 1.0, rtol=0, atol=1e-9)
            assert np.all(state.weights >= 0)
            assert np.all(state.variances[state.active] >= config.sigma2_floor)
            np.testing.assert_array_equal(state.counts - before, (~decision.matched).astype(int))
            history[:, head] = x
            head = (head + 1) % n

    def test_spawn_old_weights_total(self, config):
        state = MixtureArrays.from_mixtures([PointMixture(weights=[0.3, 0.7], means=[0.0, 1.0], variances=[1e-4, 1e-4])])
        history = np.full((1, 10), 100.0)
        decision = adapt_many(state, history, np.array([100.0]), 10, config)
        assert not decision.matched[0]
        assert state.weights[0, :2].sum() == pytest.approx(0.9, abs=1e-12)
        assert state.weights[0, 2] == pytest.approx(0.1)

    def test_matches_scalar_path(self, two_components, config):
        rng = np.random.default_rng(4)
        histories = rng.normal(30.0, 10.0, (3, 25))
        xs = np.array([16.5, 33.0, 49.0])
        state = MixtureArrays.from_mixtures([two_components] * 3)
        adapt_many(state, histories, xs, 25, config)
        for row in range(3):
            model = PixelModel.from_history(two_components, histories[row])
            adapt(model, float(xs[row]), config)
            np.testing.assert_allclose(state.mixture(row).means, model.mixture.means, rtol=1e-12)
            np.testing.assert_allclose(state.mixture(row).weights, model.mixture.weights, rtol=1e-12)
            np.testing.assert_allclose(state.mixture(row).variances, model.mixture.variances, rtol=1e-12)


class TestPixelModel:
    """Historia en anillo"""

    def test_push_evicts_oldest(self):
        model = PixelModel.from_history(PointMixture(weights=[1.0], means=[0.0], variances=[1.0]), [1.0, 2.0, 3.0])
        model.push(4.0)
        np.testing.assert_array_equal(model.history(), [2.0, 3.0, 4.0])
        assert model.filled == model.n == 3
