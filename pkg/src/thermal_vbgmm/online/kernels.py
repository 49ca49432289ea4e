"""
Kernels de arrays para la fase en línea.

Un bloque de P mezclas de píxel se guarda como arrays (P, capacidad) más un
número de componentes por fila; los huecos tras ese número son relleno (peso 0,
media 0, varianza 1) y nunca intervienen en una decisión. Crear un componente
amplía la capacidad de todo el bloque en una columna cuando una fila llena
necesita un hueco nuevo.
"""
from typing import NamedTuple, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..config.settings import Settings
from ..errors import InvalidInputError
from ..models.mixture import PointMixture

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


class MixtureArrays(BaseModel):
    """Mezclas puntuales de un bloque de píxeles, rellenas hasta una capacidad común"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_mixtures(cls, mixtures: Sequence[PointMixture]) -> "MixtureArrays":
        if not mixtures:
            raise InvalidInputError("se necesita al menos una mezcla")
        counts = np.array([m.n_components for m in mixtures], dtype=np.int64)
        state = cls.empty(len(mixtures), int(counts.max()))
        for row, m in enumerate(mixtures):
            k = m.n_components
            state.weights[row, :k] = m.weights
            state.means[row, :k] = m.means
            state.variances[row, :k] = m.variances
        state.counts = counts
        return state

    @classmethod
    def empty(cls, rows: int, capacity: int) -> "MixtureArrays":
        return cls(
            weights=np.zeros((rows, capacity)),
            means=np.zeros((rows, capacity)),
            variances=np.ones((rows, capacity)),
            counts=np.zeros(rows, dtype=np.int64),
        )

    @property
    def rows(self) -> int:
        return self.weights.shape[0]

    @property
    def capacity(self) -> int:
        return self.weights.shape[1]

    @property
    def active(self) -> np.ndarray:
        return np.arange(self.capacity) < self.counts[:, None]

    def grow(self, capacity: int) -> None:
        extra = capacity - self.capacity
        if extra <= 0:
            return
        self.weights = np.pad(self.weights, ((0, 0), (0, extra)))
        self.means = np.pad(self.means, ((0, 0), (0, extra)))
        self.variances = np.pad(self.variances, ((0, 0), (0, extra)), constant_values=1.0)

    def mixture(self, row: int) -> PointMixture:
        k = int(self.counts[row])
        return PointMixture(
            weights=self.weights[row, :k].copy(),
            means=self.means[row, :k].copy(),
            variances=self.variances[row, :k].copy(),
        )


class Decisions(NamedTuple):
    """Entradas y resultado de match-or-spawn por fila"""
    c: np.ndarray
    distance: np.ndarray
    density: np.ndarray
    epsilon: np.ndarray
    novelty_density: np.ndarray
    matched: np.ndarray


def gaussian_density(x, mean, variance):
    return _INV_SQRT_2PI / np.sqrt(variance) * np.exp(-0.5 * (x - mean) ** 2 / variance)


def closest_many(x: np.ndarray, state: MixtureArrays):
    """Componente más cercano por distancia de Mahalanobis; el menor índice en empates"""
    d = np.sqrt((x[:, None] - state.means) ** 2 / state.variances)
    d = np.where(state.active, d, np.inf)
    c = np.argmin(d, axis=1)
    return c, d[np.arange(state.rows), c]


def mixture_density_many(x: np.ndarray, state: MixtureArrays) -> np.ndarray:
    # el relleno tiene peso 0
    return (state.weights * gaussian_density(x[:, None], state.means, state.variances)).sum(axis=1)


def novelty_many(history: np.ndarray, x: np.ndarray, n: int, e_min: float):
    """
    Mejor semiancho de vecindario y su densidad uniforme para cada fila.

    p(e) = N_e(e) / N / (2e) decrece entre distancias ordenadas consecutivas,
    así que basta con probar las propias distancias (con suelo e_min). Entre
    distancias empatadas la última posición lleva el conteo inclusivo y gana el
    argmax porque comparte la misma e.
    """
    dist = np.sort(np.abs(history - x[:, None]), axis=1)
    e = np.maximum(dist, e_min)
    inside = np.arange(1, history.shape[1] + 1)
    p = inside / (n * 2.0 * e)
    best = np.argmax(p, axis=1)
    rows = np.arange(history.shape[0])
    return e[rows, best], p[rows, best]


def update_matched_many(state: MixtureArrays, rows: np.ndarray, c: np.ndarray, x: np.ndarray,
                        n: int, sigma2_floor: float) -> None:
    """Actualización follow-the-leader del componente dueño; los lados derechos usan valores previos"""
    if rows.size == 0:
        return
    w_c = state.weights[rows, c]
    mu_c = state.means[rows, c]
    var_c = state.variances[rows, c]
    denom = w_c * n + 1.0
    diff = x - mu_c
    state.means[rows, c] = mu_c + diff / denom
    state.variances[rows, c] = np.maximum(var_c + w_c * n * diff ** 2 / denom ** 2 - var_c / denom, sigma2_floor)

    owner = np.zeros((rows.size, state.capacity))
    owner[np.arange(rows.size), c] = 1.0
    w = state.weights[rows]
    state.weights[rows] = w + (owner - w) / n


def spawn_many(state: MixtureArrays, rows: np.ndarray, x: np.ndarray, epsilon: np.ndarray, n: int,
               sigma2_floor: float, continuous_uniform: bool = False) -> None:
    """Añade un componente en x con peso 1/N; los pesos previos se reescalan a un total de (N-1)/N"""
    if rows.size == 0:
        return
    state.grow(int(state.counts[rows].max()) + 1)
    w = state.weights[rows]
    state.weights[rows] = w * (((n - 1.0) / n) / w.sum(axis=1, keepdims=True))

    width2 = (2.0 * epsilon) ** 2
    variance = width2 / 12.0 if continuous_uniform else (width2 - 1.0) / 12.0
    slot = state.counts[rows]
    state.weights[rows, slot] = 1.0 / n
    state.means[rows, slot] = x
    state.variances[rows, slot] = np.maximum(variance, sigma2_floor)
    state.counts[rows] += 1


def renormalize(state: MixtureArrays) -> None:
    state.weights /= state.weights.sum(axis=1, keepdims=True)


def adapt_many(state: MixtureArrays, history: np.ndarray, x: np.ndarray, n: int,
               config: Settings) -> Decisions:
    """
    Paso match-or-spawn para cada fila de un bloque.

    Args:
        state: mezclas, actualizadas en el sitio
        history: (P, M) observaciones guardadas, M <= n
        x: (P,) nuevas observaciones
        n: longitud fija N de la historia
        config: suelos y variante de creación

    Returns:
        Las entradas de decisión por fila, calculadas sobre las mezclas previas
    """
    c, distance = closest_many(x, state)
    rows = np.arange(state.rows)
    density = gaussian_density(x, state.means[rows, c], state.variances[rows, c])
    epsilon, novelty = novelty_many(history, x, n, config.e_min)
    matched = density >= novelty

    hit = np.flatnonzero(matched)
    miss = np.flatnonzero(~matched)
    update_matched_many(state, hit, c[hit], x[hit], n, config.sigma2_floor)
    spawn_many(state, miss, x[miss], epsilon[miss], n, config.sigma2_floor, config.continuous_uniform_spawn)
    renormalize(state)
    return Decisions(c, distance, density, epsilon, novelty, matched)
