"""
Ajuste Bayes variacional de una mezcla gaussiana univariante.

Prior: Dirichlet simétrico (lambda0) sobre los pesos y Gaussiana-Gamma sobre
cada (media, precisión). El ajuste alterna la actualización de
responsabilidades (E) y la actualización conjugada del posterior (M), poda
los componentes con peso esperado por debajo de 1/N y colapsa los
supervivientes a estimaciones puntuales.

Los kernels trabajan con un eje de lote inicial, de modo que un bloque de
píxeles se ajusta en una sola pasada; ``fit`` es la entrada para un único
conjunto de datos sobre los mismos kernels.
"""
import time
from typing import Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict
from scipy.special import logsumexp

from ..config.settings import Settings, get_settings
from ..errors import InvalidInputError, NumericalFailureError
from ..models.mixture import (
    FitReport,
    Hyperparams,
    PointMixture,
    Responsibilities,
    SufficientStats,
    VariationalMixture,
)
from .kmeans import SeedLike, cluster_variances, kmeans_many, seeding_uniforms
from .merge import merge_redundant, sort_by_mean
from .special import digamma

LOG_2PI = float(np.log(2.0 * np.pi))
A0 = 1e-3
B0 = 1e-3
_REL_EPS = 1e-12
_TINY = np.finfo(np.float64).tiny


class FitBatch(BaseModel):
    """Mezclas puntuales de un lote de conjuntos de datos, con relleno común"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    counts: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    seeded: np.ndarray
    pruned: np.ndarray
    merged: np.ndarray

    def mixture(self, row: int) -> PointMixture:
        k = int(self.counts[row])
        return PointMixture(
            weights=self.weights[row, :k],
            means=self.means[row, :k],
            variances=self.variances[row, :k],
        )


def init_hyperparams(data: Sequence[float], k_max: int, v0_floor: float = 1e-6) -> Hyperparams:
    """
    Prior no informativo construido a partir de los propios datos.

    lambda0 = N/K_max, a0 = b0 = 1e-3, m0 = media, beta0 = b0/(a0 v0) con v0
    la varianza poblacional (con suelo) de los datos.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInputError("los hiperparámetros necesitan una muestra unidimensional no vacía")
    if k_max < 1:
        raise InvalidInputError(f"k_max debe ser al menos 1, recibido {k_max}")
    v0 = max(float(x.var()), v0_floor)
    return Hyperparams(lambda0=x.size / k_max, a0=A0, b0=B0, m0=float(x.mean()), beta0=B0 / (A0 * v0))


def expected_weights(lambdas: np.ndarray, active: np.ndarray) -> np.ndarray:
    """Media posterior del Dirichlet, lambda_k / suma(lambda), sobre los componentes activos"""
    w = np.where(active, lambdas, 0.0)
    return w / w.sum(axis=-1, keepdims=True)


def prune_mask(lambdas: np.ndarray, active: np.ndarray, n: int) -> np.ndarray:
    """
    Componentes que sobreviven a la regla de poda 1/N.

    Un componente se elimina cuando su peso esperado es menor que 1/N; una fila
    que se quedaría vacía conserva su componente de mayor peso.
    """
    lambdas = np.atleast_2d(lambdas)
    active = np.atleast_2d(active)
    expected = expected_weights(lambdas, active)
    keep = active & (expected >= 1.0 / n)
    empty = ~keep.any(axis=1)
    if empty.any():
        rows = np.flatnonzero(empty)
        keep[rows, np.argmax(expected[rows], axis=1)] = True
    return keep


# ---------------------------------------------------------------------------
# Kernels: datos (..., N), parámetros de componente (..., K)
# ---------------------------------------------------------------------------

def _log_rho(x, lambdas, means, betas, shapes, rates, active):
    lambda_total = np.where(active, lambdas, 0.0).sum(axis=-1, keepdims=True)
    e_log_w = digamma(lambdas) - digamma(lambda_total)
    e_log_tau = digamma(shapes) - np.log(rates)
    tau = shapes / rates
    diff2 = (x[..., :, None] - means[..., None, :]) ** 2
    const = e_log_w + 0.5 * e_log_tau - 0.5 * LOG_2PI - 0.5 / betas
    log_rho = const[..., None, :] - 0.5 * tau[..., None, :] * diff2
    return np.where(active[..., None, :], log_rho, -np.inf)


def _normalize(log_rho) -> Tuple[np.ndarray, np.ndarray]:
    with np.errstate(invalid="ignore", divide="ignore"):
        log_norm = logsumexp(log_rho, axis=-1, keepdims=True)
        bad = ~np.isfinite(log_norm[..., 0])
        r = np.exp(log_rho - np.where(np.isfinite(log_norm), log_norm, 0.0))
    np.minimum(r, 1.0, out=r)
    return r, bad


def _stats(x, r):
    counts = r.sum(axis=-2)
    safe = counts > _TINY
    sums = (r * x[..., :, None]).sum(axis=-2)
    centroids = np.divide(sums, counts, out=np.zeros_like(sums), where=safe)
    dev2 = (x[..., :, None] - centroids[..., None, :]) ** 2
    scatters = np.divide((r * dev2).sum(axis=-2), counts, out=np.zeros_like(counts), where=safe)
    return counts, centroids, scatters


def _posterior(counts, centroids, scatters, lambda0, m0, beta0, a0, b0):
    lambdas = lambda0 + counts
    betas = beta0 + counts
    means = (beta0 * m0 + counts * centroids) / betas
    shapes = a0 + counts / 2.0
    shrink = beta0 * counts / (beta0 + counts)
    rates = b0 + 0.5 * (counts * scatters + shrink * (centroids - m0) ** 2)
    return lambdas, means, betas, shapes, rates


# ---------------------------------------------------------------------------
# Operaciones sobre un único conjunto de datos
# ---------------------------------------------------------------------------

def e_step(data: Sequence[float], posterior: VariationalMixture) -> Tuple[Responsibilities, SufficientStats]:
    """
    Responsabilidades a partir del posterior actual y los estadísticos que implican.

    log rho_nk = E[ln w_k] + E[ln tau_k]/2 - ln(2 pi)/2 - E[(x_n - mu_k)^2 tau_k]/2,
    normalizado por fila en espacio logarítmico.
    """
    x = np.asarray(data, dtype=np.float64)
    active = np.ones(posterior.n_components, dtype=bool)
    log_rho = _log_rho(x, posterior.lambdas, posterior.means, posterior.betas,
                       posterior.shapes, posterior.rates, active)
    r, bad = _normalize(log_rho)
    if bad.any():
        raise NumericalFailureError(int(np.flatnonzero(bad)[0]))
    counts, centroids, scatters = _stats(x, r)
    return Responsibilities(r=r), SufficientStats(counts=counts, centroids=centroids, scatters=scatters)


def m_step(stats: SufficientStats, prior: Hyperparams) -> VariationalMixture:
    """Actualización conjugada; un componente vacío vuelve al prior"""
    lambdas, means, betas, shapes, rates = _posterior(
        stats.counts, stats.centroids, stats.scatters,
        prior.lambda0, prior.m0, prior.beta0, prior.a0, prior.b0,
    )
    posterior = VariationalMixture(lambdas=lambdas, means=means, betas=betas, shapes=shapes, rates=rates)
    posterior.components(prior)
    return posterior


def fit_report(data: Sequence[float], k_max: Optional[int] = None, config: Optional[Settings] = None,
               seed: SeedLike = None) -> FitReport:
    """Ajusta un conjunto de datos e informa de iteraciones, poda y fusión"""
    config = config or get_settings()
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidInputError("fit espera una muestra unidimensional")
    batch = fit_many(x[None, :], k_max or config.k_max, config, [config.seed if seed is None else seed])
    return FitReport(
        mixture=batch.mixture(0),
        iterations=int(batch.iterations[0]),
        converged=bool(batch.converged[0]),
        seeded_components=int(batch.seeded[0]),
        pruned_components=int(batch.pruned[0]),
        merged_components=int(batch.merged[0]),
    )


def fit(data: Sequence[float], k_max: Optional[int] = None, config: Optional[Settings] = None,
        seed: SeedLike = None) -> PointMixture:
    """
    Ajusta una mezcla con número automático de componentes.

    Args:
        data: al menos dos muestras finitas
        k_max: componentes sembrados, acotado a len(data); por defecto config.k_max
        config: configuración, la global si se omite
        seed: semilla de k-means++, config.seed si se omite

    Returns:
        PointMixture ordenada por media ascendente
    """
    return fit_report(data, k_max, config, seed).mixture


# ---------------------------------------------------------------------------
# Motor por lotes
# ---------------------------------------------------------------------------

def _merge_seeds(x, counts, centers, v_hat):
    """Fusiona los clusters de k-means redundantes antes del EM"""
    n = x.shape[1]
    active = counts > 0
    weights = counts / n
    weights, centers, v_hat, active = sort_by_mean(weights, centers, v_hat, active)
    weights, centers, v_hat, active = merge_redundant(x, weights, centers, v_hat, active)
    n_hat = np.where(active, np.rint(weights * n), 0.0)
    return n_hat, centers, v_hat, active


def fit_many(data: np.ndarray, k_max: int, config: Optional[Settings] = None,
             seeds: Optional[Sequence[SeedLike]] = None) -> FitBatch:
    """
    Ajusta cada fila de ``data`` de forma independiente.

    Solo las filas que aún no cumplen la tolerancia entran en cada iteración,
    así que el resultado de una fila no depende del resto del lote.

    Args:
        data: (P, N) muestras, N >= 2
        k_max: componentes sembrados, acotado a N
        config: configuración
        seeds: una semilla de k-means++ por fila (por defecto [config.seed, fila])

    Raises:
        NumericalFailureError: con ``row`` y ``sample_index``
    """
    config = config or get_settings()
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2:
        raise InvalidInputError("fit_many espera un array (conjuntos, muestras)")
    n_rows, n = x.shape
    if n < 2:
        raise InvalidInputError(f"un ajuste necesita al menos 2 muestras, recibidas {n}")
    if k_max < 1:
        raise InvalidInputError(f"k_max debe ser al menos 1, recibido {k_max}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("las muestras deben ser finitas")
    if seeds is None:
        seeds = [[config.seed, row] for row in range(n_rows)]
    if len(seeds) != n_rows:
        raise InvalidInputError(f"{len(seeds)} semillas para {n_rows} conjuntos")

    start = time.time()
    k = min(k_max, n)

    # 1. siembra k-means
    uniforms = seeding_uniforms(seeds, k)
    labels, centers, counts, sweeps = kmeans_many(x, k, uniforms, config.kmeans_max_iters)
    v_hat = cluster_variances(x, labels, centers, counts, config.sigma2_floor)
    active = counts > 0
    seeded = active.sum(axis=1)
    n_hat = counts.astype(np.float64)
    if config.merge_redundant:
        n_hat, centers, v_hat, active = _merge_seeds(x, n_hat, centers, v_hat)
    initial = active.sum(axis=1)

    lambdas = np.where(active, n_hat, 1.0)
    means = np.where(active, centers, 0.0)
    betas = np.where(active, 1.0 / np.maximum(n_hat, 1.0), 1.0)
    shapes = np.where(active, 1.0 / v_hat, 1.0)
    rates = np.ones_like(shapes)
    params = np.stack([lambdas, means, betas, shapes, rates])

    # 2. hiperparámetros del prior, uno por fila
    lambda0 = n / k
    m0 = x.mean(axis=1, keepdims=True)
    v0 = np.maximum(x.var(axis=1, keepdims=True), config.v0_floor)
    beta0 = B0 / (A0 * v0)

    # 3. EM sobre las filas vivas
    frozen = np.zeros(n_rows, dtype=bool)
    iterations = np.zeros(n_rows, dtype=np.int64)
    for it in range(1, config.max_iters + 1):
        live = np.flatnonzero(~frozen)
        xs, old, act = x[live], params[:, live], active[live]
        r, bad = _normalize(_log_rho(xs, *old, act))
        if bad.any():
            row, sample = np.argwhere(bad)[0]
            raise NumericalFailureError(int(sample), row=int(live[row]))
        new = np.stack(_posterior(*_stats(xs, r), lambda0, m0[live], beta0[live], A0, B0))
        new = np.where(act, new, old)

        rel = np.abs(new - old) / (np.abs(old) + _REL_EPS)
        delta = np.where(act, rel, 0.0).max(axis=(0, 2))
        params[:, live] = new
        iterations[live] = it

        if config.prune_every_iteration:
            active[live] = prune_mask(new[0], act, n)

        frozen[live] = delta < config.tol
        if frozen.all():
            break

    # 4. poda por peso esperado y colapso
    lambdas, means, betas, shapes, rates = params
    keep = prune_mask(lambdas, active, n)
    weights = np.where(keep, lambdas, 0.0)
    weights = weights / weights.sum(axis=1, keepdims=True)
    variances = np.where(keep, np.maximum(rates / shapes, config.sigma2_floor), 1.0)
    means = np.where(keep, means, 0.0)

    weights, means, variances, keep = sort_by_mean(weights, means, variances, keep)
    after_prune = keep.sum(axis=1)
    if config.merge_redundant:
        weights, means, variances, keep = merge_redundant(x, weights, means, variances, keep)
    n_components = keep.sum(axis=1)
    width = int(n_components.max())

    logger.debug(
        f"Ajustados {n_rows} conjuntos en {time.time() - start:.2f}s "
        f"(barridos k-means {sweeps}, iteraciones EM mediana {np.median(iterations):.0f} "
        f"máx {iterations.max()}, sin converger {int((~frozen).sum())})"
    )
    return FitBatch(
        weights=weights[:, :width],
        means=means[:, :width],
        variances=variances[:, :width],
        counts=n_components,
        iterations=iterations,
        converged=frozen,
        seeded=seeded,
        pruned=initial - after_prune,
        merged=(seeded - initial) + (after_prune - n_components),
    )
