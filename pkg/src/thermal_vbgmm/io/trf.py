"""
Frames térmicos crudos TRF.

Disposición: número mágico ``TRF1``, ancho y alto como u32 little-endian y
luego ancho*alto valores f32 little-endian en Kelvin, por filas.
"""
import struct
from pathlib import Path
from typing import Union

import numpy as np

from ..errors import FormatError
from ..models.frames import ThermalFrame

MAGIC = b"TRF1"
_HEADER = struct.Struct("<4sII")
HEADER_SIZE = _HEADER.size

PathLike = Union[str, Path]


def parse_trf(data: bytes, path: PathLike = None) -> ThermalFrame:
    if len(data) < HEADER_SIZE:
        raise FormatError("cabecera truncada", path, len(data))
    magic, width, height = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"número mágico {magic!r} inválido", path, 0)
    if width == 0 or height == 0:
        raise FormatError(f"raster vacío {width}x{height}", path, 4)
    expected = HEADER_SIZE + 4 * width * height
    if len(data) < expected:
        raise FormatError(f"datos truncados, se esperaban {expected} bytes", path, len(data))
    if len(data) > expected:
        raise FormatError("bytes sobrantes tras los datos", path, expected)
    values = np.frombuffer(data, dtype="<f4", count=width * height, offset=HEADER_SIZE)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise FormatError("valor no finito", path, HEADER_SIZE + 4 * int(bad[0]))
    return ThermalFrame(width=width, height=height, values=values.astype(np.float64))


def read_trf(path: PathLike) -> ThermalFrame:
    """Lee un fichero TRF; cada error lleva el offset en bytes del problema"""
    return parse_trf(Path(path).read_bytes(), path)


def encode_trf(frame: ThermalFrame) -> bytes:
    return _HEADER.pack(MAGIC, frame.width, frame.height) + frame.flat.astype("<f4").tobytes()


def write_trf(path: PathLike, frame: ThermalFrame) -> None:
    Path(path).write_bytes(encode_trf(frame))
