import os
from typing import Literal, Optional

from pydantic import Field, field_validator
try:
    from pydantic_settings import BaseSettings
except ImportError:
    from pydantic import BaseSettings


class Settings(BaseSettings):
    """Configuración del modelo de fondo y del pipeline"""

    # Historia y entrenamiento
    history_n: int = Field(default=100, ge=2, description="Frames con los que se construye la historia de cada píxel")
    k_max: int = Field(default=10, ge=1, description="Máximo de componentes por píxel")
    seed: int = Field(default=0, ge=0)

    # EM variacional
    tol: float = Field(default=1e-6, gt=0)
    max_iters: int = Field(default=100, ge=1)
    kmeans_max_iters: int = Field(default=50, ge=1)
    sigma2_floor: float = Field(default=1e-4, gt=0, description="Kelvin^2")
    v0_floor: float = Field(default=1e-6, gt=0, description="Kelvin^2")
    prune_every_iteration: bool = False
    merge_redundant: bool = True

    # Adaptación en línea
    e_min: float = Field(default=1e-3, gt=0, description="Kelvin")
    continuous_uniform_spawn: bool = False

    # Clasificación
    nu: float = Field(default=2.5, gt=0)
    classification_mode: Literal["band", "density"] = "band"
    density_threshold: Optional[float] = None

    # Paralelismo
    chunk_size: int = Field(default=4096, ge=1, description="Píxeles por bloque de modelos")
    workers: int = Field(default=0, ge=0, description="0 usa todos los núcleos")

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None

    # Salida
    report_float_format: str = "%.10g"

    class Config:
        env_prefix = "VBGMM_"
        env_file = ".env"
        case_sensitive = False

    @field_validator("density_threshold")
    @classmethod
    def _positive_threshold(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and value <= 0:
            raise ValueError("density_threshold debe ser positivo")
        return value

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, value: str) -> str:
        return value.upper()

    @property
    def effective_workers(self) -> int:
        return self.workers or (os.cpu_count() or 1)


# Instancia global de configuración
settings = Settings()


def get_settings() -> Settings:
    """Función para obtener la configuración global"""
    return settings
