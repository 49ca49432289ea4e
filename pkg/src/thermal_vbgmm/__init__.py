"""
thermal_vbgmm: sustracción de fondo en vídeo térmico con mezclas Gaussianas
bayesianas variacionales por píxel.
"""

from .config.settings import Settings, get_settings
from .core.variational import fit, fit_many, fit_report
from .errors import (
    DimensionMismatchError,
    FormatError,
    InvalidInputError,
    ManifestError,
    NumericalFailureError,
    ThermalVBError,
)
from .online.adaptation import adapt
from .pipeline.bank import ModelBank, classify, process_frame

__version__ = "0.1.0"

__all__ = [
    'Settings',
    'get_settings',
    'fit',
    'fit_many',
    'fit_report',
    'adapt',
    'ModelBank',
    'classify',
    'process_frame',
    'ThermalVBError',
    'InvalidInputError',
    'DimensionMismatchError',
    'NumericalFailureError',
    'FormatError',
    'ManifestError',
]
