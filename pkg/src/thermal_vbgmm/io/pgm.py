"""
Frames y máscaras PGM binarios (P5).

Las muestras ocupan un byte si maxval < 256 y dos bytes big-endian si no. Los
niveles de gris se devuelven tal cual como reales; en las máscaras 0 es fondo y
cualquier otro valor primer plano, y se escriben como 0/255.
"""
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np

from ..errors import FormatError, InvalidInputError
from ..models.frames import MaskFrame, ThermalFrame

PathLike = Union[str, Path]
_WHITESPACE = b" \t\r\n\v\f"


def _header(data: bytes, path: PathLike) -> Tuple[int, int, int, int]:
    """Devuelve ancho, alto, maxval y el offset de los datos"""
    magic = data[:2]
    if magic == b"P2":
        raise FormatError("PGM ASCII (P2) no admitido, conviértalo a P5", path, 0)
    if magic != b"P5":
        raise FormatError(f"número mágico {magic!r} inválido, se esperaba P5", path, 0)

    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(data) and data[pos] in _WHITESPACE:
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and data[pos] not in _WHITESPACE and data[pos:pos + 1] != b"#":
            pos += 1
        token = data[start:pos]
        if not token:
            raise FormatError("cabecera truncada", path, pos)
        if not token.isdigit():
            raise FormatError(f"campo de cabecera mal formado {token!r}", path, start)
        fields.append(int(token))
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise FormatError("falta un espacio tras maxval", path, pos)

    width, height, maxval = fields
    if width == 0 or height == 0:
        raise FormatError(f"raster vacío {width}x{height}", path, 2)
    if not 0 < maxval < 65536:
        raise FormatError(f"maxval {maxval} fuera de rango", path, pos)
    return width, height, maxval, pos + 1


def _samples(data: bytes, path: PathLike) -> Tuple[int, int, int, np.ndarray]:
    width, height, maxval, offset = _header(data, path)
    dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
    expected = offset + dtype.itemsize * width * height
    if len(data) < expected:
        raise FormatError(f"datos truncados, se esperaban {expected} bytes", path, len(data))
    if len(data) > expected:
        raise FormatError("bytes sobrantes tras los datos", path, expected)
    samples = np.frombuffer(data, dtype=dtype, count=width * height, offset=offset)
    over = np.flatnonzero(samples > maxval)
    if over.size:
        raise FormatError(f"muestra por encima de maxval {maxval}", path, offset + dtype.itemsize * int(over[0]))
    return width, height, maxval, samples


def read_pgm(path: PathLike, as_mask: bool = False) -> Union[ThermalFrame, MaskFrame]:
    """Lee un fichero P5 como frame de niveles de gris o como máscara"""
    width, height, maxval, samples = _samples(Path(path).read_bytes(), path)
    if as_mask:
        return MaskFrame(width=width, height=height, labels=samples != 0)
    return ThermalFrame(width=width, height=height, values=samples.astype(np.float64), maxval=maxval)


def read_mask(path: PathLike) -> MaskFrame:
    return read_pgm(path, as_mask=True)


def encode_pgm(values: np.ndarray, width: int, height: int, maxval: int) -> bytes:
    if not 0 < maxval < 65536:
        raise InvalidInputError(f"maxval {maxval} fuera de rango")
    flat = np.asarray(values).reshape(-1)
    if np.any(flat < 0) or np.any(flat > maxval) or np.any(flat != np.round(flat)):
        raise InvalidInputError(f"las muestras PGM deben ser enteros en [0, {maxval}]")
    dtype = "u1" if maxval < 256 else ">u2"
    header = f"P5\n{width} {height}\n{maxval}\n".encode("ascii")
    return header + flat.astype(dtype).tobytes()


def write_pgm(path: PathLike, frame: ThermalFrame, maxval: Optional[int] = None) -> None:
    """Escribe un frame de niveles de gris; maxval por defecto es el del frame, o 255"""
    maxval = maxval or frame.maxval or 255
    Path(path).write_bytes(encode_pgm(frame.flat, frame.width, frame.height, maxval))


def write_mask(path: PathLike, mask: MaskFrame) -> None:
    """Primer plano como 255, fondo como 0"""
    Path(path).write_bytes(encode_pgm(mask.flat.astype(np.uint8) * 255, mask.width, mask.height, 255))
