"""
Funciones especiales de las actualizaciones variacionales.
"""
from typing import Union

import numpy as np
from scipy import special

from ..errors import InvalidInputError

ArrayOrFloat = Union[float, np.ndarray]


def digamma(x: ArrayOrFloat) -> ArrayOrFloat:
    """
    Psi(x), la derivada logarítmica de la función Gamma.

    Args:
        x: escalar o array positivo

    Returns:
        float para entrada escalar, array de la misma forma si no
    """
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise InvalidInputError("digamma solo se define aquí para argumentos positivos y finitos")
    out = special.digamma(arr)
    if out.ndim == 0:
        return float(out)
    return out
