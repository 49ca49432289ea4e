"""
Tipos de raster: frames térmicos en Kelvin (o niveles de gris) y máscaras binarias.
"""
from enum import IntEnum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Label(IntEnum):
    """Clasificación por píxel"""
    BACKGROUND = 0
    FOREGROUND = 1


class ThermalFrame(BaseModel):
    """Raster de valores reales por filas, guardado como array (alto, ancho)"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    width: int = Field(gt=0)
    height: int = Field(gt=0)
    values: np.ndarray
    maxval: Optional[int] = Field(default=None, description="Profundidad de gris si viene de un PGM")

    @field_validator("values", mode="before")
    @classmethod
    def _float_array(cls, value):
        return np.array(value, dtype=np.float64, copy=True)

    @model_validator(mode="after")
    def _check(self) -> "ThermalFrame":
        if self.values.size != self.width * self.height:
            raise ValueError(
                f"{self.values.size} valores para un frame de {self.width}x{self.height}"
            )
        self.values = self.values.reshape(self.height, self.width)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("los valores del frame deben ser finitos")
        return self

    @property
    def shape(self):
        return (self.width, self.height)

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)


class MaskFrame(BaseModel):
    """Etiquetas fondo/primer plano; True marca primer plano"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    width: int = Field(gt=0)
    height: int = Field(gt=0)
    labels: np.ndarray

    @field_validator("labels", mode="before")
    @classmethod
    def _bool_array(cls, value):
        return np.array(value, dtype=bool, copy=True)

    @model_validator(mode="after")
    def _check(self) -> "MaskFrame":
        if self.labels.size != self.width * self.height:
            raise ValueError(
                f"{self.labels.size} etiquetas para una máscara de {self.width}x{self.height}"
            )
        self.labels = self.labels.reshape(self.height, self.width)
        return self

    @property
    def shape(self):
        return (self.width, self.height)

    @property
    def flat(self) -> np.ndarray:
        return self.labels.reshape(-1)

    @classmethod
    def background(cls, width: int, height: int) -> "MaskFrame":
        return cls(width=width, height=height, labels=np.zeros((height, width), dtype=bool))
