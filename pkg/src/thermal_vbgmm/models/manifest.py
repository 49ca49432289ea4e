"""
Manifiesto de secuencia: frames ordenados, tamaño del raster, unidad de los
valores y máscaras de ground truth alineadas con el final de la secuencia.
"""
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator


class ThermalSequenceManifest(BaseModel):
    """Ficheros de frame ordenados más ground truth opcional para un sufijo"""
    frames: List[Path] = Field(min_length=1)
    width: int = Field(gt=0)
    height: int = Field(gt=0)
    unit: Literal["kelvin", "gray8"] = "kelvin"
    masks: List[Path] = Field(default_factory=list)
    mask_start: Optional[int] = Field(default=None, description="Índice del frame de la primera máscara")

    @model_validator(mode="after")
    def _alignment(self) -> "ThermalSequenceManifest":
        if not self.masks:
            if self.mask_start is not None:
                raise ValueError("mask_start sin máscaras")
            return self
        if self.mask_start is None:
            raise ValueError("máscaras sin mask_start")
        if self.mask_start + len(self.masks) != len(self.frames):
            raise ValueError("las máscaras deben alinearse 1:1 con un sufijo de los frames")
        return self

    @property
    def size(self):
        return (self.width, self.height)

    def mask_for(self, frame_index: int) -> Optional[Path]:
        if self.mask_start is None or frame_index < self.mask_start:
            return None
        return self.masks[frame_index - self.mask_start]

    @property
    def evaluated_indices(self) -> List[int]:
        if self.mask_start is None:
            return []
        return list(range(self.mask_start, len(self.frames)))
