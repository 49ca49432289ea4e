"""
Métricas de evaluación por píxel (el primer plano es la clase positiva).
"""
from typing import List

from pydantic import BaseModel, Field, model_validator


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


class PixelMetrics(BaseModel):
    """Conteos de confusión con precisión, recall y F1"""
    tp: int = Field(ge=0)
    fp: int = Field(ge=0)
    fn: int = Field(ge=0)
    tn: int = Field(ge=0)
    precision: float = Field(ge=0, le=1)
    recall: float = Field(ge=0, le=1)
    f1: float = Field(ge=0, le=1)

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int, tn: int) -> "PixelMetrics":
        precision = _ratio(tp, tp + fp)
        recall = _ratio(tp, tp + fn)
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        return cls(tp=tp, fp=fp, fn=fn, tn=tn, precision=precision, recall=recall, f1=f1)

    @model_validator(mode="after")
    def _identities(self) -> "PixelMetrics":
        if (self.precision != _ratio(self.tp, self.tp + self.fp)
                or self.recall != _ratio(self.tp, self.tp + self.fn)):
            raise ValueError("precisión/recall no cuadran con los conteos de confusión")
        return self

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


class EvaluationReport(BaseModel):
    """Métricas agregadas más el desglose por frame"""
    aggregate: PixelMetrics
    per_frame: List[PixelMetrics]
    frame_indices: List[int]
    best_frame: int = Field(description="Índice del frame con mayor F1")
    worst_frame: int = Field(description="Índice del frame con menor F1")
