"""
Descripción de una secuencia térmica sintética con un blob caliente en movimiento.
"""
from typing import Iterator, Tuple

from pydantic import BaseModel, Field


class BlobTrack(BaseModel):
    """Rectángulo a velocidad constante, en píxeles por frame"""
    x0: int
    y0: int
    vx: int = 0
    vy: int = 0
    width: int = Field(ge=0)
    height: int = Field(ge=0)
    delta_t: float = Field(default=0.0, description="Kelvin sobre el fondo")

    def position(self, t: int) -> Tuple[int, int]:
        return self.x0 + self.vx * t, self.y0 + self.vy * t


class SyntheticSpec(BaseModel):
    """Temperatura de fondo, ruido, deriva y blob de una secuencia generada"""
    width: int = Field(gt=0)
    height: int = Field(gt=0)
    frames: int = Field(gt=0)
    train_frames: int = Field(ge=0)
    background: float = Field(default=295.0, description="Kelvin")
    noise: float = Field(default=0.3, ge=0, description="Kelvin")
    drift_amplitude: float = Field(default=0.0, ge=0)
    drift_period: float = Field(default=100.0, gt=0, description="Frames")
    blob: BlobTrack

    def blob_frames(self) -> Iterator[Tuple[int, int, int]]:
        """Genera (índice de frame, x, y) para cada frame que muestra el blob"""
        for t in range(self.train_frames, self.frames):
            x, y = self.blob.position(t - self.train_frames)
            yield t, x, y
