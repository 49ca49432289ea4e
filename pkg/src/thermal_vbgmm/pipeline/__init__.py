"""
Sustracción de fondo por píxel: acumulación de historias, entrenamiento y el
bucle por frame de clasificar y después adaptar.
"""

from .bank import ModelBank, accumulate, bank_from_frames, classify, foreground_many, process_frame, train

__all__ = [
    'ModelBank',
    'accumulate',
    'bank_from_frames',
    'classify',
    'foreground_many',
    'process_frame',
    'train',
]
