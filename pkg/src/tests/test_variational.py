"""
Tests del ajuste variacional (pasos E y M, poda, fusión y lotes)
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import special

from thermal_vbgmm.core.merge import merge_redundant, sort_by_mean
from thermal_vbgmm.core.variational import (
    e_step,
    expected_weights,
    fit,
    fit_many,
    fit_report,
    init_hyperparams,
    m_step,
    prune_mask,
)
from thermal_vbgmm.errors import InvalidInputError, NumericalFailureError
from thermal_vbgmm.models.mixture import Hyperparams, SufficientStats, VariationalMixture


def random_posterior(rng, k):
    return VariationalMixture(
        lambdas=rng.uniform(0.5, 20.0, k),
        means=rng.uniform(-5.0, 5.0, k),
        betas=rng.uniform(0.1, 10.0, k),
        shapes=rng.uniform(0.5, 10.0, k),
        rates=rng.uniform(0.5, 10.0, k),
    )


def oracle_responsibilities(x, post):
    """rho sin normalizar en precisión extendida, normalizado con fsum"""
    ld = np.longdouble
    e_log_w = special.digamma(post.lambdas) - special.digamma(post.lambdas.sum())
    e_log_tau = special.digamma(post.shapes) - np.log(post.rates)
    rows = []
    for xn in x:
        log_rho = [
            ld(e_log_w[k]) + ld(e_log_tau[k]) / 2 - ld(math.log(2 * math.pi)) / 2
            - (ld(post.shapes[k]) / ld(post.rates[k]) * (ld(xn) - ld(post.means[k])) ** 2 + 1 / ld(post.betas[k])) / 2
            for k in range(post.n_components)
        ]
        peak = max(log_rho)
        rho = [np.exp(v - peak) for v in log_rho]
        total = math.fsum(float(v) for v in rho)
        rows.append([float(v) / total for v in rho])
    return np.array(rows)


class TestInitHyperparams:
    """Prior no informativo construido a partir de los datos"""

    def test_lambda0_is_n_over_k(self):
        prior = init_hyperparams(np.arange(100.0), 10)
        assert prior.lambda0 == 10.0
        assert prior.a0 == 1e-3 and prior.b0 == 1e-3

    def test_mean_and_beta0(self):
        prior = init_hyperparams([18.0, 22.0], 2)
        assert prior.m0 == 20.0
        assert prior.beta0 == pytest.approx(0.25)

    def test_constant_data_floors_v0(self):
        prior = init_hyperparams([3.0] * 5, 1)
        assert prior.beta0 == pytest.approx(1e-3 / (1e-3 * 1e-6))

    def test_rejects_empty(self):
        with pytest.raises(InvalidInputError):
            init_hyperparams([], 1)


class TestEStep:
    """Responsabilidades y estadísticos suficientes"""

    def test_single_component(self):
        post = random_posterior(np.random.default_rng(0), 1)
        r, stats = e_step([1.0, 2.0, 3.0], post)
        np.testing.assert_array_equal(r.r, np.ones((3, 1)))
        assert stats.counts[0] == pytest.approx(3.0)

    def test_identical_components_split_evenly(self):
        post = VariationalMixture(lambdas=[2.0, 2.0], means=[1.0, 1.0], betas=[1.0, 1.0],
                                  shapes=[2.0, 2.0], rates=[1.0, 1.0])
        r, _ = e_step([0.0, 1.0, 4.0], post)
        np.testing.assert_allclose(r.r, 0.5, rtol=0, atol=1e-14)

    def test_matches_extended_precision_oracle(self):
        rng = np.random.default_rng(123)
        for _ in range(1000):
            n = int(rng.integers(1, 11))
            k = int(rng.integers(1, 4))
            x = rng.uniform(-8.0, 8.0, n)
            post = random_posterior(rng, k)
            r, stats = e_step(x, post)
            np.testing.assert_allclose(r.r, oracle_responsibilities(x, post), rtol=0, atol=1e-10)
            np.testing.assert_allclose(r.r.sum(axis=1), 1.0, rtol=0, atol=1e-12)
            assert stats.counts.sum() == pytest.approx(n, abs=1e-9)

    def test_non_finite_row_names_sample(self):
        post = VariationalMixture(lambdas=[1.0], means=[0.0], betas=[1.0], shapes=[1.0], rates=[1.0])
        with pytest.raises(NumericalFailureError) as info:
            e_step([0.0, 1e200], post)
        assert info.value.sample_index == 1


class TestMStep:
    """Actualización conjugada del posterior"""

    prior = Hyperparams(lambda0=5.0, a0=1e-3, b0=1e-3, m0=20.0, beta0=0.25)

    def test_worked_example(self):
        stats = SufficientStats(counts=[10.0], centroids=[30.0], scatters=[4.0])
        post = m_step(stats, self.prior)
        assert post.lambdas[0] == pytest.approx(15.0)
        assert post.betas[0] == pytest.approx(10.25)
        assert post.means[0] == pytest.approx(305.0 / 10.25, abs=1e-12)
        assert post.shapes[0] == pytest.approx(5.001)
        expected_b = 1e-3 + 0.5 * (40.0 + (0.25 * 10.0 / 10.25) * 100.0)
        assert post.rates[0] == pytest.approx(expected_b, abs=1e-12)
        assert post.rates[0] == pytest.approx(32.196, abs=1e-3)

    def test_empty_component_reverts_to_prior(self):
        post = m_step(SufficientStats(counts=[0.0], centroids=[0.0], scatters=[0.0]), self.prior)
        assert post.lambdas[0] == 5.0
        assert post.betas[0] == 0.25
        assert post.means[0] == 20.0
        assert post.shapes[0] == 1e-3
        assert post.rates[0] == 1e-3

    def test_increment_identities(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            x = rng.normal(20.0, 3.0, int(rng.integers(2, 30)))
            prior = init_hyperparams(x, 3)
            _, stats = e_step(x, random_posterior(rng, 3))
            post = m_step(stats, prior)
            np.testing.assert_allclose(post.lambdas - prior.lambda0, stats.counts, rtol=0, atol=1e-9)
            np.testing.assert_allclose(post.betas - prior.beta0, stats.counts, rtol=0, atol=1e-9)
            np.testing.assert_allclose(post.shapes - prior.a0, stats.counts / 2, rtol=0, atol=1e-9)

    def test_matches_closed_form(self):
        """1000 casos aleatorios contra la actualización conjugada escrita escalar a escalar"""
        rng = np.random.default_rng(31)
        for _ in range(1000):
            k = int(rng.integers(1, 6))
            counts = rng.uniform(0.0, 60.0, k)
            counts[rng.random(k) < 0.2] = 0.0
            stats = SufficientStats(counts=counts, centroids=rng.normal(295.0, 10.0, k),
                                    scatters=rng.uniform(0.0, 9.0, k))
            prior = Hyperparams(lambda0=float(rng.uniform(0.5, 50.0)), a0=float(rng.uniform(1e-4, 2.0)),
                                b0=float(rng.uniform(1e-4, 2.0)), m0=float(rng.normal(295.0, 10.0)),
                                beta0=float(rng.uniform(1e-4, 5.0)))
            post = m_step(stats, prior)
            for j in range(k):
                n_k, xbar, s = float(stats.counts[j]), float(stats.centroids[j]), float(stats.scatters[j])
                beta = prior.beta0 + n_k
                expected = {
                    "lambdas": prior.lambda0 + n_k,
                    "means": (prior.beta0 * prior.m0 + n_k * xbar) / beta,
                    "betas": beta,
                    "shapes": prior.a0 + n_k / 2.0,
                    "rates": prior.b0 + (n_k * s + prior.beta0 * n_k / beta * (xbar - prior.m0) ** 2) / 2.0,
                }
                for name, value in expected.items():
                    assert getattr(post, name)[j] == pytest.approx(value, rel=1e-12, abs=0.0), name

    def test_components_checked_against_prior(self):
        post = m_step(SufficientStats(counts=[3.0, 0.0], centroids=[1.0, 0.0], scatters=[0.5, 0.0]), self.prior)
        components = post.components(self.prior)
        assert [c.lambda_k for c in components] == [8.0, 5.0]
        below = VariationalMixture(lambdas=[1.0], means=[0.0], betas=[1.0], shapes=[1.0], rates=[1.0])
        with pytest.raises(ValidationError):
            below.components(self.prior)
        # sin prior solo se exige positividad
        assert below.components()[0].beta_k == 1.0

    def test_single_component_lambda(self):
        x = np.array([1.0, 4.0, 2.0, 8.0])
        prior = init_hyperparams(x, 1)
        post = VariationalMixture(lambdas=[1.0], means=[0.0], betas=[1.0], shapes=[1.0], rates=[1.0])
        _, stats = e_step(x, post)
        assert m_step(stats, prior).lambdas[0] == prior.lambda0 + 4.0


class TestPruning:
    """Regla de poda 1/N sobre los pesos esperados"""

    def test_expected_weights_ignore_inactive(self):
        w = expected_weights(np.array([[3.0, 1.0, 4.0]]), np.array([[True, False, True]]))
        np.testing.assert_allclose(w, [[3 / 7, 0.0, 4 / 7]])

    def test_small_component_dropped(self):
        lambdas = np.array([[48.5, 0.5, 51.0]])
        keep = prune_mask(lambdas, np.ones((1, 3), dtype=bool), 100)
        np.testing.assert_array_equal(keep, [[True, False, True]])

    def test_heaviest_kept_when_all_fall_below(self):
        lambdas = np.array([[0.2, 0.5, 0.3], [5.0, 5.0, 5.0]])
        keep = prune_mask(lambdas, np.ones((2, 3), dtype=bool), 1)
        # en empate gana el primer índice
        np.testing.assert_array_equal(keep, [[False, True, False], [True, False, False]])

    def test_inactive_stay_inactive(self):
        keep = prune_mask(np.array([9.0, 1.0]), np.array([True, False]), 4)
        np.testing.assert_array_equal(keep, [[True, False]])


class TestFit:
    """Ajuste completo con número automático de componentes"""

    def test_two_modes(self, two_mode_data, config):
        report = fit_report(two_mode_data, 10, config, seed=0)
        mixture = report.mixture
        assert mixture.n_components == 2
        low, high = two_mode_data[two_mode_data < 33.0], two_mode_data[two_mode_data >= 33.0]
        # con modos tan separados el posterior reproduce los momentos de cada modo
        np.testing.assert_allclose(mixture.means, [low.mean(), high.mean()], atol=0.05)
        np.testing.assert_allclose(mixture.stds, [low.std(), high.std()], atol=0.05)
        np.testing.assert_allclose(mixture.weights, [low.size / 100, high.size / 100], atol=0.01)
        assert mixture.weights.sum() == pytest.approx(1.0, abs=1e-9)
        assert 1 <= report.iterations <= config.max_iters
        assert report.seeded_components - report.pruned_components - report.merged_components == 2

    def test_constant_data(self, config):
        mixture = fit([296.5] * 30, 10, config)
        assert mixture.n_components == 1
        assert mixture.means[0] == pytest.approx(296.5)
        assert mixture.variances[0] >= config.sigma2_floor

    def test_components_sorted_by_mean(self, two_mode_data, config):
        mixture = fit(two_mode_data, 10, config.model_copy(update={"merge_redundant": False}))
        assert np.all(np.diff(mixture.means) >= 0)

    def test_without_merge_weights_respect_pruning(self, two_mode_data, config):
        mixture = fit(two_mode_data, 10, config.model_copy(update={"merge_redundant": False}))
        assert mixture.n_components >= 2
        assert mixture.weights.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.all(mixture.weights >= 1.0 / two_mode_data.size)

    def test_prune_every_iteration_is_inert_when_kmax_is_small(self, two_mode_data, config):
        """
        Con lambda0 = N/K y K <= N/2 el peso esperado nunca baja de 1/(2K) >= 1/N,
        así que podar en cada iteración no cambia nada.
        """
        for update in ({}, {"merge_redundant": False}):
            base = config.model_copy(update=update)
            plain = fit_report(two_mode_data, 10, base, seed=3)
            eager = fit_report(two_mode_data, 10, base.model_copy(update={"prune_every_iteration": True}), seed=3)
            np.testing.assert_array_equal(eager.mixture.means, plain.mixture.means)
            np.testing.assert_array_equal(eager.mixture.weights, plain.mixture.weights)
            np.testing.assert_array_equal(eager.mixture.variances, plain.mixture.variances)
            assert eager.iterations == plain.iterations

    def test_translation_equivariance(self, two_mode_data, config):
        tight = config.model_copy(update={"tol": 1e-13, "max_iters": 1000})
        base = fit(two_mode_data, 2, tight, seed=5)
        shifted = fit(two_mode_data + 100.0, 2, tight, seed=5)
        np.testing.assert_allclose(shifted.means - base.means, 100.0, rtol=0, atol=1e-6)
        np.testing.assert_allclose(shifted.weights, base.weights, rtol=0, atol=1e-9)

    def test_iteration_budget(self, config):
        """200 historias sembradas con entre uno y tres modos"""
        rng = np.random.default_rng(2024)
        data = []
        for _ in range(200):
            modes = int(rng.integers(1, 4))
            centers = rng.uniform(280.0, 320.0, modes)
            data.append(rng.normal(centers[rng.integers(0, modes, 100)], rng.uniform(0.2, 2.0)))
        batch = fit_many(np.stack(data), 10, config)
        assert batch.iterations.max() <= config.max_iters
        assert np.median(batch.iterations) <= 10
        assert np.all(batch.counts >= 1)
        np.testing.assert_allclose(batch.weights.sum(axis=1), 1.0, rtol=0, atol=1e-9)

    def test_rejected_input(self, config):
        with pytest.raises(InvalidInputError):
            fit([1.0], 3, config)
        with pytest.raises(InvalidInputError):
            fit([1.0, float("nan")], 3, config)


class TestFitMany:
    """Motor vectorizado"""

    def test_rows_match_individual_fits(self, two_mode_data, config):
        rng = np.random.default_rng(1)
        rows = np.stack([two_mode_data, rng.normal(295.0, 0.3, 100), np.full(100, 290.0)])
        batch = fit_many(rows, 10, config, seeds=[[0, 0], [0, 1], [0, 2]])
        for row in range(3):
            single = fit(rows[row], 10, config, seed=[0, row])
            one = batch.mixture(row)
            assert one.n_components == single.n_components
            np.testing.assert_allclose(one.means, single.means, rtol=1e-10)
            np.testing.assert_allclose(one.weights, single.weights, rtol=1e-10)
            np.testing.assert_allclose(one.variances, single.variances, rtol=1e-10)

    def test_seed_count_must_match(self, config):
        with pytest.raises(InvalidInputError):
            fit_many(np.zeros((2, 5)), 2, config, seeds=[0])


class TestMerge:
    """Orden por media y fusión de componentes redundantes"""

    def test_sort_packs_active_by_mean(self):
        w = np.array([[0.2, 0.0, 0.5, 0.3]])
        mu = np.array([[5.0, 0.0, -1.0, 2.0]])
        var = np.ones((1, 4))
        active = np.array([[True, False, True, True]])
        w, mu, var, active = sort_by_mean(w, mu, var, active)
        np.testing.assert_array_equal(mu[0, :3], [-1.0, 2.0, 5.0])
        np.testing.assert_array_equal(w[0, :3], [0.5, 0.3, 0.2])
        np.testing.assert_array_equal(active[0], [True, True, True, False])

    def test_duplicate_components_merge(self):
        x = np.random.default_rng(0).normal(10.0, 1.0, (1, 200))
        w = np.array([[0.5, 0.5]])
        mu = np.array([[9.9, 10.1]])
        var = np.array([[1.0, 1.0]])
        w, mu, var, active = merge_redundant(x, w, mu, var, np.array([[True, True]]))
        assert active.sum() == 1
        assert w[0, 0] == pytest.approx(1.0)
        assert mu[0, 0] == pytest.approx(10.0)
        assert var[0, 0] == pytest.approx(1.01)

    def test_separated_components_stay(self, two_mode_data):
        x = two_mode_data[None, :]
        w = np.array([[0.5, 0.5]])
        mu = np.array([[16.0, 50.0]])
        var = np.array([[2.25, 4.0]])
        _, _, _, active = merge_redundant(x, w, mu, var, np.array([[True, True]]))
        assert active.sum() == 2
