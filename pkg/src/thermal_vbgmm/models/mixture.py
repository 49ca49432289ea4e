"""
Tipos de mezcla compartidos por el ajuste variacional y la fase en línea.
"""
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

WEIGHT_SUM_TOLERANCE = 1e-9
ROW_SUM_TOLERANCE = 1e-12


def _as_vector(value) -> np.ndarray:
    arr = np.array(value, dtype=np.float64, copy=True)
    if arr.ndim != 1:
        raise ValueError("se esperaba un array unidimensional")
    return arr


class Hyperparams(BaseModel):
    """Constantes fijas de los priors Dirichlet y Gaussiana-Gamma"""
    lambda0: float = Field(gt=0, description="Concentración Dirichlet por componente")
    a0: float = Field(gt=0, description="Forma de la Gamma")
    b0: float = Field(gt=0, description="Tasa de la Gamma")
    m0: float = Field(description="Media del prior, Kelvin")
    beta0: float = Field(gt=0, description="Escala de precisión de la media del prior")


class VariationalComponent(BaseModel):
    """
    Parámetros posteriores de un componente.

    Validado con ``context={"prior": Hyperparams}`` exige además
    lambda_k >= lambda0, beta_k >= beta0 y a_k >= a0.
    """
    lambda_k: float = Field(gt=0, description="Parámetro Dirichlet")
    m_k: float = Field(description="Media posterior, Kelvin")
    beta_k: float = Field(gt=0)
    a_k: float = Field(gt=0)
    b_k: float = Field(gt=0)

    @model_validator(mode="after")
    def _above_prior(self, info: ValidationInfo) -> "VariationalComponent":
        prior = (info.context or {}).get("prior")
        if prior is None:
            return self
        if self.lambda_k < prior.lambda0 or self.beta_k < prior.beta0 or self.a_k < prior.a0:
            raise ValueError("el posterior no puede quedar por debajo del prior")
        return self


class VariationalMixture(BaseModel):
    """
    Parámetros posteriores de todos los componentes, un array por parámetro.

    El índice k de cada array corresponde al mismo componente.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    lambdas: np.ndarray
    means: np.ndarray
    betas: np.ndarray
    shapes: np.ndarray
    rates: np.ndarray

    @field_validator("lambdas", "means", "betas", "shapes", "rates", mode="before")
    @classmethod
    def _vector(cls, value):
        return _as_vector(value)

    @model_validator(mode="after")
    def _check(self) -> "VariationalMixture":
        sizes = {arr.shape[0] for arr in (self.lambdas, self.means, self.betas, self.shapes, self.rates)}
        if len(sizes) != 1:
            raise ValueError("los arrays del posterior tienen longitudes distintas")
        for name in ("lambdas", "betas", "shapes", "rates"):
            if np.any(getattr(self, name) <= 0):
                raise ValueError(f"{name} debe ser estrictamente positivo")
        if not np.all(np.isfinite(self.means)):
            raise ValueError("las medias deben ser finitas")
        return self

    @property
    def n_components(self) -> int:
        return int(self.lambdas.shape[0])

    def components(self, prior: Optional[Hyperparams] = None) -> List[VariationalComponent]:
        """Un VariationalComponent por índice, comprobado contra ``prior`` si se da"""
        context = {"prior": prior} if prior is not None else None
        return [
            VariationalComponent.model_validate(
                {"lambda_k": l, "m_k": m, "beta_k": be, "a_k": a, "b_k": b}, context=context,
            )
            for l, m, be, a, b in zip(self.lambdas, self.means, self.betas, self.shapes, self.rates)
        ]


class Responsibilities(BaseModel):
    """Probabilidades de asignación r_nk, una fila por muestra"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    r: np.ndarray

    @field_validator("r", mode="before")
    @classmethod
    def _matrix(cls, value):
        arr = np.array(value, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError("las responsabilidades deben ser una matriz N x K")
        return arr

    @model_validator(mode="after")
    def _rows(self) -> "Responsibilities":
        if np.any(self.r < 0) or np.any(self.r > 1):
            raise ValueError("las responsabilidades deben estar en [0, 1]")
        if np.any(np.abs(self.r.sum(axis=1) - 1.0) > ROW_SUM_TOLERANCE):
            raise ValueError("cada fila de responsabilidades debe sumar uno")
        return self


class SufficientStats(BaseModel):
    """Conteos, centroides y dispersiones ponderados por las responsabilidades"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    counts: np.ndarray = Field(description="N_k")
    centroids: np.ndarray = Field(description="xbar_k, Kelvin")
    scatters: np.ndarray = Field(description="sigma_k, Kelvin^2")

    @field_validator("counts", "centroids", "scatters", mode="before")
    @classmethod
    def _vector(cls, value):
        return _as_vector(value)

    @model_validator(mode="after")
    def _check(self) -> "SufficientStats":
        if np.any(self.counts < 0):
            raise ValueError("los conteos deben ser no negativos")
        if np.any(self.scatters < 0):
            raise ValueError("las dispersiones deben ser no negativas")
        return self

    @property
    def total(self) -> float:
        return float(self.counts.sum())


class PointMixture(BaseModel):
    """Estimaciones puntuales (peso, media, varianza) por componente"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    @field_validator("weights", "means", "variances", mode="before")
    @classmethod
    def _vector(cls, value):
        return _as_vector(value)

    @model_validator(mode="after")
    def _check(self) -> "PointMixture":
        if not (self.weights.shape == self.means.shape == self.variances.shape):
            raise ValueError("pesos, medias y varianzas tienen longitudes distintas")
        if self.weights.shape[0] < 1:
            raise ValueError("una mezcla necesita al menos un componente")
        if np.any(self.weights < 0):
            raise ValueError("los pesos deben ser no negativos")
        if abs(self.weights.sum() - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ValueError(f"los pesos suman {self.weights.sum()!r}, se esperaba 1")
        if np.any(self.variances <= 0) or not np.all(np.isfinite(self.variances)):
            raise ValueError("las varianzas deben ser positivas y finitas")
        if not np.all(np.isfinite(self.means)):
            raise ValueError("las medias deben ser finitas")
        return self

    @property
    def n_components(self) -> int:
        return int(self.weights.shape[0])

    @property
    def stds(self) -> np.ndarray:
        return np.sqrt(self.variances)


class KMeansSeed(BaseModel):
    """Resultado de la inicialización k-means"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    assignments: np.ndarray = Field(description="Índice de cluster por muestra, sobre los clusters conservados")
    counts: np.ndarray = Field(description="N-hat_k por cluster conservado")
    mixture: PointMixture
    posterior: VariationalMixture


class FitReport(BaseModel):
    """Mezcla ajustada y cómo fue el ajuste"""
    mixture: PointMixture
    iterations: int
    converged: bool
    seeded_components: int
    pruned_components: int
    merged_components: int
