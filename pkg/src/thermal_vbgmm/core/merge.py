"""
Fusión voraz de componentes redundantes tras el ajuste variacional.

Los componentes se mantienen ordenados por media; en cada ronda cada par
adyacente se sustituye por su Gaussiana de momentos equivalentes y se fusiona
el par cuya sustitución conserva la mayor log-verosimilitud de los datos de
entrenamiento, siempre que mejore el criterio de información bayesiano (tres
parámetros libres menos valen 1.5 ln N nats). Cada fila se detiene por su cuenta.
"""
from typing import Tuple

import numpy as np
from loguru import logger

LOG_2PI = float(np.log(2.0 * np.pi))

Arrays = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


def _take(order: np.ndarray, *arrays: np.ndarray):
    return tuple(np.take_along_axis(a, order, axis=1) for a in arrays)


def sort_by_mean(weights: np.ndarray, means: np.ndarray, variances: np.ndarray,
                 active: np.ndarray) -> Arrays:
    """Componentes activos primero, media ascendente, empates por índice original"""
    key = np.where(active, means, np.inf)
    order = np.argsort(key, axis=1, kind="stable")
    return _take(order, weights, means, variances, active)


def _compact(weights, means, variances, active) -> Arrays:
    order = np.argsort(~active, axis=1, kind="stable")
    return _take(order, weights, means, variances, active)


def log_component_densities(x: np.ndarray, weights: np.ndarray, means: np.ndarray,
                            variances: np.ndarray) -> np.ndarray:
    """log(w_k N(x_n | mu_k, var_k)) como array (P, N, K); los pesos nulos dan -inf"""
    with np.errstate(divide="ignore"):
        log_w = np.log(weights)
    diff2 = (x[:, :, None] - means[:, None, :]) ** 2
    return log_w[:, None, :] - 0.5 * (LOG_2PI + np.log(variances)[:, None, :] + diff2 / variances[:, None, :])


def moment_match(weights: np.ndarray, means: np.ndarray, variances: np.ndarray):
    """Gaussiana única con el peso, la media y la varianza de cada par adyacente"""
    wl, wr = weights[:, :-1], weights[:, 1:]
    ml, mr = means[:, :-1], means[:, 1:]
    total = wl + wr
    safe = total > 0
    merged_mean = np.divide(wl * ml + wr * mr, total, out=ml.copy(), where=safe)
    spread = wl * (variances[:, :-1] + (ml - merged_mean) ** 2) + wr * (variances[:, 1:] + (mr - merged_mean) ** 2)
    merged_var = np.divide(spread, total, out=variances[:, :-1].copy(), where=safe)
    return total, merged_mean, merged_var


def merge_redundant(x: np.ndarray, weights: np.ndarray, means: np.ndarray, variances: np.ndarray,
                    active: np.ndarray) -> Arrays:
    """
    Fusiona componentes adyacentes mientras la fusión reduzca el BIC.

    Args:
        x: (P, N) muestras de entrenamiento
        weights, means, variances, active: (P, K), entradas activas agrupadas a la
            izquierda y ordenadas por media

    Returns:
        Los arrays fusionados con la misma disposición
    """
    weights, means, variances, active = (a.copy() for a in (weights, means, variances, active))
    n_rows, n = x.shape
    penalty = 1.5 * np.log(n)
    rows = np.arange(n_rows)
    done = active.sum(axis=1) <= 1
    rounds = 0

    while not done.all():
        rounds += 1
        log_f = log_component_densities(x, weights, means, variances)
        peak = log_f.max(axis=2, keepdims=True)
        scaled = np.exp(log_f - peak)
        total = scaled.sum(axis=2)
        current = (peak[..., 0] + np.log(total)).sum(axis=1)

        merged_w, merged_mu, merged_var = moment_match(weights, means, variances)
        log_g = log_component_densities(x, merged_w, merged_mu, merged_var)
        replaced = total[..., None] - scaled[..., :-1] - scaled[..., 1:] + np.exp(log_g - peak)
        with np.errstate(divide="ignore"):
            candidate = (peak + np.log(np.maximum(replaced, 0.0))).sum(axis=1)
        candidate = np.where(active[:, 1:], candidate, -np.inf)

        best = np.argmax(candidate, axis=1)
        accept = ~done & (current - candidate[rows, best] < penalty)
        done |= ~accept
        if not accept.any():
            break

        r = np.flatnonzero(accept)
        j = best[r]
        weights[r, j] = merged_w[r, j]
        means[r, j] = merged_mu[r, j]
        variances[r, j] = merged_var[r, j]
        weights[r, j + 1] = 0.0
        means[r, j + 1] = 0.0
        variances[r, j + 1] = 1.0
        active[r, j + 1] = False
        weights, means, variances, active = _compact(weights, means, variances, active)
        done |= active.sum(axis=1) <= 1

    logger.debug(f"Fusión de redundantes terminada tras {rounds} rondas")
    return weights, means, variances, active
