"""
model.bin: modelos de píxel entrenados con sus historias.

Cabecera: número mágico ``VBGM``, versión u16, ancho u32, alto u32 (little
endian). Por píxel, por filas: número de componentes K como u16, K ternas f64
(peso, media, varianza), longitud de historia N como u32 y N valores f64 de la
historia, del más antiguo al más reciente.
first.
"""
import struct
from pathlib import Path
from typing import Optional, Union

import numpy as np
from loguru import logger

from ..config.settings import Settings
from ..errors import FormatError
from ..online.kernels import MixtureArrays
from ..pipeline.bank import ModelBank

MAGIC = b"VBGM"
VERSION = 1
_HEADER = struct.Struct("<4sHII")
_COUNT = struct.Struct("<H")
_LENGTH = struct.Struct("<I")

PathLike = Union[str, Path]


def encode_model(bank: ModelBank) -> bytes:
    state, history = bank.to_arrays()
    parts = [_HEADER.pack(MAGIC, VERSION, bank.width, bank.height)]
    length = _LENGTH.pack(history.shape[1])
    for p in range(bank.n_pixels):
        k = int(state.counts[p])
        triples = np.stack([state.weights[p, :k], state.means[p, :k], state.variances[p, :k]], axis=1)
        parts.append(_COUNT.pack(k))
        parts.append(triples.astype("<f8").tobytes())
        parts.append(length)
        parts.append(history[p].astype("<f8").tobytes())
    return b"".join(parts)


def write_model(path: PathLike, bank: ModelBank) -> None:
    data = encode_model(bank)
    Path(path).write_bytes(data)
    logger.info(f"Escritos {bank.n_pixels} modelos de píxel en {path} ({len(data)} bytes)")


class _Reader:
    def __init__(self, data: bytes, path: PathLike):
        self.data = data
        self.path = path
        self.pos = 0

    def take(self, size: int, what: str) -> int:
        start = self.pos
        if start + size > len(self.data):
            raise FormatError(f"{what} truncado", self.path, len(self.data))
        self.pos += size
        return start

    def unpack(self, fmt: struct.Struct, what: str):
        return fmt.unpack_from(self.data, self.take(fmt.size, what))

    def floats(self, count: int, what: str) -> np.ndarray:
        return np.frombuffer(self.data, dtype="<f8", count=count, offset=self.take(8 * count, what))


def decode_model(data: bytes, path: PathLike = None, config: Optional[Settings] = None) -> ModelBank:
    reader = _Reader(data, path)
    magic, version, width, height = reader.unpack(_HEADER, "cabecera")
    if magic != MAGIC:
        raise FormatError(f"número mágico {magic!r} inválido", path, 0)
    if version != VERSION:
        raise FormatError(f"versión {version} no admitida", path, 4)
    if width == 0 or height == 0:
        raise FormatError(f"raster vacío {width}x{height}", path, 6)

    n_pixels = width * height
    mixtures = []
    history = None
    for p in range(n_pixels):
        start = reader.pos
        (k,) = reader.unpack(_COUNT, "número de componentes")
        if k == 0:
            raise FormatError(f"el píxel {p} no tiene componentes", path, start)
        triples = reader.floats(3 * k, "bloque de componentes").reshape(k, 3)
        (n,) = reader.unpack(_LENGTH, "campo de longitud de historia")
        if history is None:
            if n < 2:
                raise FormatError(f"longitud de historia {n} demasiado corta", path, reader.pos - _LENGTH.size)
            history = np.empty((n_pixels, n))
        elif n != history.shape[1]:
            raise FormatError(f"el píxel {p} tiene historia de longitud {n}, se esperaba {history.shape[1]}",
                              path, reader.pos - _LENGTH.size)
        history[p] = reader.floats(n, "bloque de historia")

        weights, means, variances = triples[:, 0], triples[:, 1], triples[:, 2]
        if not (np.all(np.isfinite(triples)) and np.all(np.isfinite(history[p]))):
            raise FormatError(f"el píxel {p} contiene valores no finitos", path, start)
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9 or np.any(variances <= 0):
            raise FormatError(f"el píxel {p} no es una mezcla válida", path, start)
        mixtures.append((weights, means, variances))
    if reader.pos != len(data):
        raise FormatError("bytes sobrantes tras el último píxel", path, reader.pos)

    capacity = max(len(w) for w, _, _ in mixtures)
    state = MixtureArrays.empty(n_pixels, capacity)
    for p, (weights, means, variances) in enumerate(mixtures):
        k = len(weights)
        state.weights[p, :k] = weights
        state.means[p, :k] = means
        state.variances[p, :k] = variances
        state.counts[p] = k
    return ModelBank.from_arrays(width, height, state, history, config)


def read_model(path: PathLike, config: Optional[Settings] = None) -> ModelBank:
    bank = decode_model(Path(path).read_bytes(), path, config)
    logger.info(f"Cargados {bank.n_pixels} modelos de píxel de {path} ({bank.width}x{bank.height}, N={bank.n})")
    return bank
