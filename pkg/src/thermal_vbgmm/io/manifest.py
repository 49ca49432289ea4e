"""
Manifiestos de secuencia orientados a líneas.

    size <width> <height>
    unit <kelvin|gray8>
    frame <path> [mask <path>]

Las rutas son relativas al directorio del manifiesto. Se ignoran las líneas en
blanco y los comentarios ``#``.
"""
import os
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Union

from loguru import logger
from pydantic import ValidationError

from ..errors import DimensionMismatchError, FormatError, ManifestError
from ..models.frames import ThermalFrame
from ..models.manifest import ThermalSequenceManifest
from .pgm import read_pgm
from .trf import read_trf

PathLike = Union[str, Path]

# extensiones admitidas por unidad de los valores
UNIT_SUFFIXES = {
    "kelvin": (".trf",),
    "gray8": (".pgm", ".pnm"),
}


def _lines(text: str) -> Iterator[Tuple[int, List[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


def parse_manifest(text: str, base: Path, path: PathLike = None) -> ThermalSequenceManifest:
    size: Optional[Tuple[int, int]] = None
    unit: Optional[str] = None
    frames: List[Path] = []
    masks: List[Path] = []
    mask_start: Optional[int] = None

    for number, fields in _lines(text):
        key = fields[0]
        if key == "size":
            if size is not None or len(fields) != 3:
                raise ManifestError("se esperaba una única línea 'size <width> <height>'", path, number)
            try:
                size = (int(fields[1]), int(fields[2]))
            except ValueError:
                raise ManifestError(f"tamaño inválido {fields[1:]}", path, number)
        elif key == "unit":
            if unit is not None or len(fields) != 2 or fields[1] not in UNIT_SUFFIXES:
                raise ManifestError("se esperaba una única línea 'unit <kelvin|gray8>'", path, number)
            unit = fields[1]
        elif key == "frame":
            if size is None or unit is None:
                raise ManifestError("'size' y 'unit' deben preceder a los frames", path, number)
            if len(fields) == 2:
                if mask_start is not None:
                    raise ManifestError("las máscaras deben cubrir todos los frames tras el primero con máscara", path, number)
            elif len(fields) == 4 and fields[2] == "mask":
                if mask_start is None:
                    mask_start = len(frames)
                masks.append(base / fields[3])
            else:
                raise ManifestError("se esperaba 'frame <path> [mask <path>]'", path, number)
            frames.append(base / fields[1])
        else:
            raise ManifestError(f"directiva desconocida {key!r}", path, number)

    if not frames:
        raise ManifestError("el manifiesto no lista ningún frame", path)
    missing = next((p for p in frames + masks if not p.is_file()), None)
    if missing is not None:
        raise ManifestError(f"falta el fichero {missing}", path)
    try:
        return ThermalSequenceManifest(
            frames=frames, width=size[0], height=size[1], unit=unit, masks=masks, mask_start=mask_start,
        )
    except ValidationError as e:
        raise ManifestError(str(e), path) from e


def read_manifest(path: PathLike) -> ThermalSequenceManifest:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ManifestError(f"no se puede leer el manifiesto: {e}", path) from e
    manifest = parse_manifest(text, path.parent, path)
    logger.info(
        f"Manifiesto {path}: {len(manifest.frames)} frames {manifest.width}x{manifest.height} "
        f"({manifest.unit}), {len(manifest.masks)} máscaras"
    )
    return manifest


def _relative(target: Path, base: Path) -> str:
    try:
        return Path(os.path.relpath(target, base)).as_posix()
    except ValueError:
        return target.as_posix()


def write_manifest(path: PathLike, manifest: ThermalSequenceManifest) -> None:
    path = Path(path)
    base = path.parent
    lines = [f"size {manifest.width} {manifest.height}", f"unit {manifest.unit}"]
    for index, frame in enumerate(manifest.frames):
        line = f"frame {_relative(frame, base)}"
        mask = manifest.mask_for(index)
        if mask is not None:
            line += f" mask {_relative(mask, base)}"
        lines.append(line)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_frame(path: PathLike, unit: Optional[str] = None,
               size: Optional[Tuple[int, int]] = None) -> ThermalFrame:
    """
    Lee un frame .trf o .pgm.

    Args:
        path: fichero del frame
        unit: "kelvin" exige .trf; "gray8" exige un PGM de un byte (maxval <= 255).
            None acepta cualquiera de los dos formatos
        size: (ancho, alto) esperado, si se conoce

    Returns:
        ThermalFrame con los valores tal cual están en el fichero
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if unit is not None and unit not in UNIT_SUFFIXES:
        raise FormatError(f"unidad desconocida {unit!r}", path)
    allowed = UNIT_SUFFIXES[unit] if unit is not None else UNIT_SUFFIXES["kelvin"] + UNIT_SUFFIXES["gray8"]
    if suffix not in allowed:
        raise FormatError(f"la extensión {suffix!r} no corresponde a la unidad {unit or 'kelvin|gray8'}", path)

    frame = read_trf(path) if suffix == ".trf" else read_pgm(path)
    if unit == "gray8" and frame.maxval > 255:
        raise FormatError(f"maxval {frame.maxval} no es gray8", path)
    if size is not None and (frame.width, frame.height) != tuple(size):
        raise DimensionMismatchError(tuple(size), (frame.width, frame.height), str(path))
    return frame


def iter_frames(manifest: ThermalSequenceManifest, start: int = 0) -> Iterator[Tuple[int, ThermalFrame]]:
    for index in range(start, len(manifest.frames)):
        yield index, load_frame(manifest.frames[index], manifest.unit, manifest.size)
