"""
Precisión, recall y F1 por píxel de las máscaras predichas frente al ground truth.
"""
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from loguru import logger

from ..errors import DimensionMismatchError, InvalidInputError
from ..models.frames import MaskFrame
from ..models.metrics import EvaluationReport, PixelMetrics

REPORT_COLUMNS = ["frame_index", "tp", "fp", "fn", "tn", "precision", "recall", "f1"]


def confusion(predicted: MaskFrame, truth: MaskFrame) -> PixelMetrics:
    """Conteos de un frame, con el primer plano como clase positiva"""
    if predicted.shape != truth.shape:
        raise DimensionMismatchError(truth.shape, predicted.shape, "máscara predicha")
    p = predicted.flat
    t = truth.flat
    tp = int(np.count_nonzero(p & t))
    fp = int(np.count_nonzero(p & ~t))
    fn = int(np.count_nonzero(~p & t))
    tn = int(np.count_nonzero(~p & ~t))
    return PixelMetrics.from_counts(tp, fp, fn, tn)


def evaluate(predicted: Sequence[MaskFrame], truth: Sequence[MaskFrame],
             frame_indices: Optional[Sequence[int]] = None) -> EvaluationReport:
    """
    Acumula los conteos de confusión sobre cada píxel de cada frame.

    Args:
        predicted: máscaras producidas por el pipeline
        truth: ground truth, alineado 1:1 con ``predicted``
        frame_indices: índice en la secuencia de cada par, 0..n-1 si se omite

    Returns:
        EvaluationReport con métricas agregadas y por frame; el mejor y el
        peor frame se eligen por F1, el menor índice en empates
    """
    if len(predicted) != len(truth):
        raise InvalidInputError(f"{len(predicted)} máscaras predichas para {len(truth)} máscaras de referencia")
    if not predicted:
        raise InvalidInputError("no hay nada que evaluar")
    indices = list(frame_indices) if frame_indices is not None else list(range(len(predicted)))
    if len(indices) != len(predicted):
        raise InvalidInputError("se necesita un índice de frame por par de máscaras")

    per_frame = [confusion(p, t) for p, t in zip(predicted, truth)]
    aggregate = PixelMetrics.from_counts(
        sum(m.tp for m in per_frame),
        sum(m.fp for m in per_frame),
        sum(m.fn for m in per_frame),
        sum(m.tn for m in per_frame),
    )
    f1 = np.array([m.f1 for m in per_frame])
    report = EvaluationReport(
        aggregate=aggregate,
        per_frame=per_frame,
        frame_indices=indices,
        best_frame=indices[int(np.argmax(f1))],
        worst_frame=indices[int(np.argmin(f1))],
    )
    logger.info(
        f"Evaluados {len(per_frame)} frames: precisión {aggregate.precision:.4f}, "
        f"recall {aggregate.recall:.4f}, F1 {aggregate.f1:.4f} "
        f"(mejor frame {report.best_frame}, peor frame {report.worst_frame})"
    )
    return report


def report_frame(report: EvaluationReport) -> pd.DataFrame:
    """Filas por frame seguidas de la fila ``aggregate``"""
    rows = [
        {"frame_index": index, **m.model_dump(include=set(REPORT_COLUMNS))}
        for index, m in zip(report.frame_indices, report.per_frame)
    ]
    rows.append({"frame_index": "aggregate", **report.aggregate.model_dump(include=set(REPORT_COLUMNS))})
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def write_report(path: Union[str, Path], report: EvaluationReport, float_format: str = "%.10g") -> None:
    report_frame(report).to_csv(path, index=False, float_format=float_format, lineterminator="\n")
