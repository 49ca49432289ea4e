"""
Modelos Pydantic del modelo de fondo térmico.
Validación y serialización de datos.
"""

from .frames import Label, MaskFrame, ThermalFrame
from .manifest import ThermalSequenceManifest
from .metrics import EvaluationReport, PixelMetrics
from .mixture import (
    FitReport,
    Hyperparams,
    KMeansSeed,
    PointMixture,
    Responsibilities,
    SufficientStats,
    VariationalComponent,
    VariationalMixture,
)
from .pixel import MatchResult, PixelModel
from .synthetic import BlobTrack, SyntheticSpec

__all__ = [
    'Label',
    'MaskFrame',
    'ThermalFrame',
    'ThermalSequenceManifest',
    'EvaluationReport',
    'PixelMetrics',
    'FitReport',
    'Hyperparams',
    'KMeansSeed',
    'PointMixture',
    'Responsibilities',
    'SufficientStats',
    'VariationalComponent',
    'VariationalMixture',
    'MatchResult',
    'PixelModel',
    'BlobTrack',
    'SyntheticSpec',
]
