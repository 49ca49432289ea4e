"""
Lectura y escritura de frames, máscaras, manifiestos y modelos entrenados.
"""

from .manifest import iter_frames, load_frame, parse_manifest, read_manifest, write_manifest
from .model_file import decode_model, encode_model, read_model, write_model
from .pgm import read_mask, read_pgm, write_mask, write_pgm
from .trf import read_trf, write_trf

__all__ = [
    'read_trf',
    'write_trf',
    'read_pgm',
    'read_mask',
    'write_pgm',
    'write_mask',
    'read_manifest',
    'parse_manifest',
    'write_manifest',
    'load_frame',
    'iter_frames',
    'read_model',
    'write_model',
    'encode_model',
    'decode_model',
]
