"""
Evaluación: métricas por píxel, secuencias sintéticas y el experimento de juguete.
"""

from .metrics import confusion, evaluate, report_frame, write_report
from .synthetic import parse_synth_spec, read_synth_spec, synth_sequence, write_sequence
from .toy import ToyStage, toy_experiment, toy_frame, write_toy_report

__all__ = [
    'confusion',
    'evaluate',
    'report_frame',
    'write_report',
    'parse_synth_spec',
    'read_synth_spec',
    'synth_sequence',
    'write_sequence',
    'ToyStage',
    'toy_experiment',
    'toy_frame',
    'write_toy_report',
]
