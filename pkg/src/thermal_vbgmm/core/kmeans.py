"""
k-means++ y iteraciones de Lloyd, vectorizados sobre conjuntos de datos independientes.

Cada fila de un lote (P, N) se agrupa exactamente igual que si fuera sola: las
filas toman sus variables de siembra de su propio generador y Lloyd se detiene
por fila en un punto fijo de asignación, que más barridos dejan intacto.
"""
from typing import Sequence, Tuple, Union

import numpy as np

from ..errors import InvalidInputError
from ..models.mixture import KMeansSeed, PointMixture, VariationalMixture

SeedLike = Union[int, Sequence[int], np.random.SeedSequence, None]


def seeding_uniforms(seeds: Sequence[SeedLike], k: int) -> np.ndarray:
    """Una fila de k uniformes por semilla, cada una de su propio generador"""
    return np.stack([np.random.default_rng(seed).random(k) for seed in seeds])


def _assign(data: np.ndarray, centers: np.ndarray) -> np.ndarray:
    dist = (data[:, :, None] - centers[:, None, :]) ** 2
    # argmin conserva el índice menor en los empates
    return np.argmin(dist, axis=2)


def _plus_plus(data: np.ndarray, uniforms: np.ndarray, k: int) -> np.ndarray:
    n_rows, n = data.shape
    rows = np.arange(n_rows)
    centers = np.empty((n_rows, k))
    first = np.minimum((uniforms[:, 0] * n).astype(np.int64), n - 1)
    centers[:, 0] = data[rows, first]
    d2 = (data - centers[:, :1]) ** 2
    for j in range(1, k):
        cdf = np.cumsum(d2, axis=1)
        target = uniforms[:, j] * cdf[:, -1]
        # primer índice cuyo peso acumulado supera el objetivo; los puntos de peso
        # nulo solo se eligen si todos los puntos ya son centros
        idx = np.minimum((cdf <= target[:, None]).sum(axis=1), n - 1)
        centers[:, j] = data[rows, idx]
        d2 = np.minimum(d2, (data - centers[:, j:j + 1]) ** 2)
    return centers


def kmeans_many(data: np.ndarray, k: int, uniforms: np.ndarray, max_iters: int = 50
                ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """
    Agrupa cada fila de ``data`` en a lo sumo ``k`` grupos.

    Args:
        data: (P, N) muestras
        k: clusters por fila, 1 <= k <= N
        uniforms: (P, k) variables de siembra en [0, 1)
        max_iters: límite de barridos de Lloyd

    Returns:
        labels (P, N), centers (P, k), counts (P, k) y los barridos hechos.
        Los clusters vacíos conservan su centro sembrado y conteo cero.
    """
    centers = _plus_plus(data, uniforms, k)
    labels = _assign(data, centers)
    cluster_ids = np.arange(k)
    sweeps = 0
    for sweeps in range(1, max_iters + 1):
        onehot = labels[:, :, None] == cluster_ids
        counts = onehot.sum(axis=1)
        sums = (onehot * data[:, :, None]).sum(axis=1)
        centers = np.divide(sums, counts, out=centers.copy(), where=counts > 0)
        new_labels = _assign(data, centers)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    onehot = labels[:, :, None] == cluster_ids
    counts = onehot.sum(axis=1)
    return labels, centers, counts, sweeps


def cluster_variances(data: np.ndarray, labels: np.ndarray, centers: np.ndarray,
                      counts: np.ndarray, floor: float) -> np.ndarray:
    """Varianza poblacional dentro del cluster, con suelo; los vacíos reciben el suelo"""
    k = centers.shape[1]
    onehot = labels[:, :, None] == np.arange(k)
    dev2 = (data[:, :, None] - centers[:, None, :]) ** 2
    scatter = (onehot * dev2).sum(axis=1)
    var = np.divide(scatter, counts, out=np.zeros_like(scatter), where=counts > 0)
    return np.maximum(var, floor)


def kmeans_seed(data: Sequence[float], k_max: int, seed: SeedLike = 0,
                max_iters: int = 50, sigma2_floor: float = 1e-4) -> KMeansSeed:
    """
    Inicialización k-means del ajuste variacional.

    Los clusters vacíos se descartan, así que la K devuelta puede ser menor que ``k_max``.
    Por cluster conservado: mu = centroide, peso = N-hat/N, tau = 1/v-hat,
    beta = 1/N-hat, a = tau, b = 1, lambda = N * weight.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInputError("k-means necesita una muestra unidimensional no vacía")
    if k_max < 1:
        raise InvalidInputError(f"k_max debe ser al menos 1, se recibió {k_max}")
    if k_max > x.size:
        raise InvalidInputError(f"k_max={k_max} supera las {x.size} muestras")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("las muestras deben ser finitas")

    uniforms = seeding_uniforms([seed], k_max)
    labels, centers, counts, _ = kmeans_many(x[None, :], k_max, uniforms, max_iters)
    var = cluster_variances(x[None, :], labels, centers, counts, sigma2_floor)[0]
    counts, centers, labels = counts[0], centers[0], labels[0]

    kept = np.flatnonzero(counts > 0)
    remap = np.full(k_max, -1)
    remap[kept] = np.arange(kept.size)
    n_hat = counts[kept].astype(np.float64)
    weights = n_hat / x.size
    tau = 1.0 / var[kept]
    return KMeansSeed(
        assignments=remap[labels],
        counts=n_hat,
        mixture=PointMixture(weights=weights, means=centers[kept], variances=var[kept]),
        posterior=VariationalMixture(
            lambdas=x.size * weights,
            means=centers[kept],
            betas=1.0 / n_hat,
            shapes=tau,
            rates=np.ones_like(tau),
        ),
    )
