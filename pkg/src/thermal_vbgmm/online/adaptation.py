"""
Adaptación en línea de un único modelo de píxel.

Cada operación envuelve los kernels de bloque con un bloque de una fila, así
que un píxel adaptado por separado sigue la misma aritmética que dentro de un banco.
"""
from typing import Optional, Sequence, Tuple

import numpy as np

from ..config.settings import Settings, get_settings
from ..errors import InvalidInputError
from ..models.mixture import PointMixture
from ..models.pixel import MatchResult, PixelModel
from .kernels import (
    MixtureArrays,
    adapt_many,
    closest_many,
    novelty_many,
    renormalize,
    spawn_many,
    update_matched_many,
)

_ROW = np.zeros(1, dtype=np.int64)


def _check_n(n: int) -> None:
    if n < 1:
        raise InvalidInputError(f"la longitud de la historia debe ser positiva, se recibió {n}")


def closest_component(mixture: PointMixture, x_new: float) -> Tuple[int, float]:
    """Índice y distancia de Mahalanobis del componente más cercano"""
    c, d = closest_many(np.array([x_new], dtype=np.float64), MixtureArrays.from_mixtures([mixture]))
    return int(c[0]), float(d[0])


def novelty_density(history: Sequence[float], n: int, x_new: float,
                    e_min: Optional[float] = None) -> Tuple[float, float]:
    """
    Maximiza sobre el semiancho la densidad de vecindario uniforme de ``x_new``.

    Args:
        history: observaciones guardadas (al menos una)
        n: longitud fija N de la historia, usada como normalizador
        x_new: la nueva observación
        e_min: menor semiancho considerado, config.e_min si se omite

    Returns:
        (epsilon, p(x_new | epsilon))
    """
    _check_n(n)
    values = np.asarray(history, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise InvalidInputError("la novedad necesita una historia no vacía")
    e_min = get_settings().e_min if e_min is None else e_min
    eps, p = novelty_many(values[None, :], np.array([x_new], dtype=np.float64), n, e_min)
    return float(eps[0]), float(p[0])


def update_matched(mixture: PointMixture, c: int, x_new: float, n: int,
                   sigma2_floor: float = 1e-4) -> PointMixture:
    """El componente ``c`` absorbe ``x_new``; cada peso se mueve 1/N hacia su pertenencia"""
    _check_n(n)
    if not 0 <= c < mixture.n_components:
        raise InvalidInputError(f"componente {c} fuera de rango para {mixture.n_components} componentes")
    state = MixtureArrays.from_mixtures([mixture])
    update_matched_many(state, _ROW, np.array([c]), np.array([x_new], dtype=np.float64), n, sigma2_floor)
    return state.mixture(0)


def spawn_component(mixture: PointMixture, x_new: float, epsilon: float, n: int,
                    sigma2_floor: float = 1e-4, continuous_uniform: bool = False) -> PointMixture:
    """Nuevo componente en ``x_new`` con peso 1/N y varianza según el ancho del vecindario"""
    _check_n(n)
    if not epsilon > 0:
        raise InvalidInputError(f"epsilon debe ser positivo, se recibió {epsilon}")
    state = MixtureArrays.from_mixtures([mixture])
    spawn_many(state, _ROW, np.array([x_new], dtype=np.float64), np.array([epsilon], dtype=np.float64),
               n, sigma2_floor, continuous_uniform)
    renormalize(state)
    return state.mixture(0)


def adapt(model: PixelModel, x_new: float, config: Optional[Settings] = None) -> MatchResult:
    """
    Actualización match-or-spawn de un modelo de píxel; después mete ``x_new`` en su historia.

    El modelo se modifica en el sitio.
    """
    config = config or get_settings()
    if not np.isfinite(x_new):
        raise InvalidInputError(f"la observación debe ser finita, se recibió {x_new}")
    state = MixtureArrays.from_mixtures([model.mixture])
    decision = adapt_many(state, model.history()[None, :], np.array([x_new], dtype=np.float64),
                          model.n, config)
    model.mixture = state.mixture(0)
    model.push(x_new)
    return MatchResult(
        c=int(decision.c[0]),
        distance=float(decision.distance[0]),
        density=float(decision.density[0]),
        epsilon=float(decision.epsilon[0]),
        novelty_density=float(decision.novelty_density[0]),
        matched=bool(decision.matched[0]),
    )
