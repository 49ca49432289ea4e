"""
Secuencias térmicas sintéticas: fondo estático con ruido y deriva lenta
opcional, y un rectángulo caliente a velocidad constante, con máscaras exactas.
"""
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from loguru import logger
from pydantic import ValidationError

from ..errors import InvalidInputError, ManifestError
from ..io.manifest import write_manifest
from ..io.pgm import write_mask
from ..io.trf import write_trf
from ..models.frames import MaskFrame, ThermalFrame
from ..models.manifest import ThermalSequenceManifest
from ..models.synthetic import BlobTrack, SyntheticSpec

PathLike = Union[str, Path]

# directiva -> (nombres de campo, conversores)
_DIRECTIVES = {
    "size": (("width", "height"), (int, int)),
    "frames": (("frames",), (int,)),
    "train_frames": (("train_frames",), (int,)),
    "background": (("background",), (float,)),
    "noise": (("noise",), (float,)),
    "drift": (("drift_amplitude", "drift_period"), (float, float)),
    "blob": (("x0", "y0", "vx", "vy", "width", "height", "delta_t"), (int, int, int, int, int, int, float)),
}


def parse_synth_spec(text: str, path: PathLike = None) -> SyntheticSpec:
    """
    Interpreta líneas ``clave valor...``.

    size W H / frames T / train_frames N / background T_BG / noise SIGMA /
    drift AMPLITUDE PERIOD / blob X0 Y0 VX VY W H DELTA_T
    """
    fields = {}
    blob = {"x0": 0, "y0": 0, "width": 0, "height": 0}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        key, values = line[0], line[1:]
        if key not in _DIRECTIVES:
            raise ManifestError(f"directiva desconocida {key!r}", path, number)
        names, types = _DIRECTIVES[key]
        if len(values) != len(names):
            raise ManifestError(f"'{key}' lleva {len(names)} valores", path, number)
        try:
            parsed = {name: cast(value) for name, cast, value in zip(names, types, values)}
        except ValueError as e:
            raise ManifestError(f"valor inválido en '{key}': {e}", path, number)
        (blob if key == "blob" else fields).update(parsed)
    try:
        return SyntheticSpec(**fields, blob=BlobTrack(**blob))
    except ValidationError as e:
        raise ManifestError(str(e), path) from e


def read_synth_spec(path: PathLike) -> SyntheticSpec:
    return parse_synth_spec(Path(path).read_text(encoding="utf-8"), path)


def _check_bounds(spec: SyntheticSpec) -> None:
    blob = spec.blob
    if blob.width == 0 or blob.height == 0:
        return
    for t, x, y in spec.blob_frames():
        if x < 0 or y < 0 or x + blob.width > spec.width or y + blob.height > spec.height:
            raise InvalidInputError(
                f"el blob en ({x}, {y}) de {blob.width}x{blob.height} se sale del "
                f"frame de {spec.width}x{spec.height} en el frame {t}"
            )


def synth_sequence(spec: SyntheticSpec, seed: int = 0) -> Tuple[List[ThermalFrame], List[Optional[MaskFrame]]]:
    """
    Genera cada frame y el ground truth de los frames que muestran el blob.

    Los valores se guardan con precisión float32 para sobrevivir a un TRF escrito y releído.
    Las máscaras son None en los frames de entrenamiento.
    """
    _check_bounds(spec)
    rng = np.random.default_rng(seed)
    shape = (spec.height, spec.width)
    blob_at = {t: (x, y) for t, x, y in spec.blob_frames()}
    visible = spec.blob.width > 0 and spec.blob.height > 0 and spec.blob.delta_t != 0

    frames, masks = [], []
    for t in range(spec.frames):
        drift = spec.drift_amplitude * np.sin(2.0 * np.pi * t / spec.drift_period)
        values = spec.background + drift + spec.noise * rng.standard_normal(shape)
        labels = np.zeros(shape, dtype=bool)
        if t in blob_at and visible:
            x, y = blob_at[t]
            values[y:y + spec.blob.height, x:x + spec.blob.width] += spec.blob.delta_t
            labels[y:y + spec.blob.height, x:x + spec.blob.width] = True
        values = values.astype(np.float32).astype(np.float64)
        frames.append(ThermalFrame(width=spec.width, height=spec.height, values=values))
        masks.append(MaskFrame(width=spec.width, height=spec.height, labels=labels) if t in blob_at else None)
    return frames, masks


def write_sequence(spec: SyntheticSpec, out_dir: PathLike, seed: int = 0) -> Path:
    """Escribe frame_XXXXXX.trf, truth_XXXXXX.pgm y manifest.txt; devuelve la ruta del manifiesto"""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    frames, masks = synth_sequence(spec, seed)
    frame_paths, mask_paths = [], []
    for t, (frame, mask) in enumerate(zip(frames, masks)):
        frame_path = out / f"frame_{t:06d}.trf"
        write_trf(frame_path, frame)
        frame_paths.append(frame_path)
        if mask is not None:
            mask_path = out / f"truth_{t:06d}.pgm"
            write_mask(mask_path, mask)
            mask_paths.append(mask_path)
    manifest = ThermalSequenceManifest(
        frames=frame_paths,
        width=spec.width,
        height=spec.height,
        unit="kelvin",
        masks=mask_paths,
        mask_start=spec.train_frames if mask_paths else None,
    )
    manifest_path = out / "manifest.txt"
    write_manifest(manifest_path, manifest)
    logger.info(f"Escritos {len(frames)} frames sintéticos ({len(mask_paths)} con ground truth) en {out}")
    return manifest_path
