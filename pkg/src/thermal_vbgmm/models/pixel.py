"""
Estado del modelo por píxel para la fase en línea.
"""
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .mixture import PointMixture


class PixelModel(BaseModel):
    """
    Mezcla ajustada más el buffer circular de las últimas N observaciones.

    El buffer tiene N huecos; ``head`` es el siguiente hueco a sobrescribir y
    ``filled`` cuenta los huecos válidos (N tras el calentamiento).
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    mixture: PointMixture
    buffer: np.ndarray
    n: int = Field(ge=1, description="Longitud fija N de la historia")
    nu: float = Field(default=2.5, gt=0, description="Escalar de confianza del test de banda")
    head: int = 0
    filled: int = 0

    @model_validator(mode="after")
    def _check(self) -> "PixelModel":
        if self.buffer.shape != (self.n,):
            raise ValueError(f"el buffer de historia debe tener exactamente {self.n} huecos")
        if not 0 <= self.filled <= self.n or not 0 <= self.head < self.n:
            raise ValueError("índices del buffer circular fuera de rango")
        return self

    @classmethod
    def from_history(cls, mixture: PointMixture, history: Sequence[float], nu: float = 2.5) -> "PixelModel":
        values = np.array(history, dtype=np.float64, copy=True)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("la historia debe ser una secuencia no vacía")
        return cls(mixture=mixture, buffer=values, n=values.size, nu=nu, head=0, filled=values.size)

    def history(self) -> np.ndarray:
        """Observaciones válidas, de la más antigua a la más reciente"""
        if self.filled < self.n:
            return self.buffer[: self.filled].copy()
        return np.roll(self.buffer, -self.head)

    def push(self, value: float) -> None:
        self.buffer[self.head] = value
        self.head = (self.head + 1) % self.n
        self.filled = min(self.filled + 1, self.n)


class MatchResult(BaseModel):
    """Resultado de la decisión match-or-spawn para una observación"""
    c: int = Field(ge=0, description="Índice del componente más cercano")
    distance: float = Field(ge=0, description="Distancia de Mahalanobis D_c")
    density: float = Field(ge=0, description="N(x | mu_c, sigma_c^2)")
    epsilon: float = Field(gt=0, description="Semiancho óptimo del vecindario")
    novelty_density: float = Field(ge=0, description="p(x | epsilon)")
    matched: bool

    @model_validator(mode="after")
    def _decision(self) -> "MatchResult":
        if self.matched != (self.density >= self.novelty_density):
            raise ValueError("matched debe ser density >= novelty_density")
        return self
