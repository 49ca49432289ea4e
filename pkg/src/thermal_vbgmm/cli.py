"""
Interfaz de línea de comandos: train, run, eval, toy y synth.
"""
import argparse
import sys
import time
from pathlib import Path
from typing import List, Optional

from loguru import logger

from .config.settings import Settings
from .errors import InvalidInputError, ThermalVBError
from .evaluation.metrics import evaluate, write_report
from .evaluation.synthetic import read_synth_spec, write_sequence
from .evaluation.toy import toy_experiment, write_toy_report
from .io.manifest import iter_frames, load_frame, read_manifest
from .io.model_file import read_model, write_model
from .io.pgm import read_mask, write_mask
from .pipeline.bank import ModelBank
from .utils.logging import configure_logging

# opción de la CLI -> campo de Settings
_OVERRIDES = {
    "history_n": "history_n",
    "kmax": "k_max",
    "seed": "seed",
    "nu": "nu",
    "mode": "classification_mode",
    "threshold": "density_threshold",
    "workers": "workers",
    "chunk_size": "chunk_size",
    "log_level": "log_level",
    "log_file": "log_file",
}


def build_settings(args: argparse.Namespace) -> Settings:
    """Primero entorno y .env, encima las opciones de la línea de comandos"""
    overrides = {
        field: getattr(args, flag)
        for flag, field in _OVERRIDES.items()
        if getattr(args, flag, None) is not None
    }
    return Settings(**overrides)


def mask_path(mask_dir: Path, index: int) -> Path:
    return mask_dir / f"mask_{index:06d}.pgm"


def cmd_train(args: argparse.Namespace, config: Settings) -> None:
    manifest = read_manifest(args.manifest)
    bank = ModelBank(manifest.width, manifest.height, config)
    if len(manifest.frames) < bank.n:
        raise InvalidInputError(f"el manifiesto tiene {len(manifest.frames)} frames, se necesitan {bank.n} para entrenar")
    logger.info(f"🚀 Acumulando {bank.n} frames de entrenamiento")
    for path in manifest.frames[: bank.n]:
        bank.accumulate(load_frame(path, manifest.unit, manifest.size))
    bank.train()
    write_model(args.out, bank)


def cmd_run(args: argparse.Namespace, config: Settings) -> None:
    manifest = read_manifest(args.manifest)
    bank = read_model(args.model, config)
    if (bank.width, bank.height) != (manifest.width, manifest.height):
        raise InvalidInputError(
            f"el modelo es {bank.width}x{bank.height}, los frames del manifiesto son {manifest.width}x{manifest.height}"
        )
    mask_dir = Path(args.mask_dir)
    mask_dir.mkdir(parents=True, exist_ok=True)
    start_index = bank.n if args.start is None else args.start
    start = time.time()
    processed = 0
    for index, frame in iter_frames(manifest, start_index):
        write_mask(mask_path(mask_dir, index), bank.process_frame(frame))
        processed += 1
    elapsed = time.time() - start
    logger.info(f"✅ Escritas {processed} máscaras en {mask_dir} en {elapsed:.2f}s")


def cmd_eval(args: argparse.Namespace, config: Settings) -> None:
    manifest = read_manifest(args.manifest)
    indices = manifest.evaluated_indices
    if not indices:
        raise InvalidInputError(f"el manifiesto {args.manifest} no tiene máscaras de referencia")
    pred_dir = Path(args.pred_dir)
    predicted, truth = [], []
    for index in indices:
        path = mask_path(pred_dir, index)
        if not path.is_file():
            raise InvalidInputError(f"falta la máscara predicha {path}")
        predicted.append(read_mask(path))
        truth.append(read_mask(manifest.mask_for(index)))
    report = evaluate(predicted, truth, indices)
    write_report(args.report, report, config.report_float_format)
    logger.info(f"📊 Informe escrito en {args.report}")


def cmd_toy(args: argparse.Namespace, config: Settings) -> None:
    stages = toy_experiment(args.seed if args.seed is not None else config.seed, config)
    write_toy_report(args.report, stages, config.report_float_format)
    logger.info(f"📊 Informe del experimento de juguete escrito en {args.report}")


def cmd_synth(args: argparse.Namespace, config: Settings) -> None:
    spec = read_synth_spec(args.spec)
    write_sequence(spec, args.out_dir, args.seed if args.seed is not None else config.seed)


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--workers", type=int, help="Hilos de trabajo, 0 usa todos los núcleos")
    parser.add_argument("--chunk-size", type=int, help="Píxeles por bloque de modelos")
    parser.add_argument("--log-level", help="Nivel de log (DEBUG, INFO, ...)")
    parser.add_argument("--log-file", help="Registrar también en este fichero")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermal-vbgmm",
        description="Sustracción de fondo en vídeo térmico con mezclas Gaussianas variacionales por píxel",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    train = commands.add_parser("train", help="Acumula N frames y ajusta cada píxel")
    train.add_argument("--manifest", required=True)
    train.add_argument("--out", required=True, help="model.bin a escribir")
    train.add_argument("--history-n", type=int)
    train.add_argument("--kmax", type=int)
    train.add_argument("--seed", type=int)
    _common(train)
    train.set_defaults(handler=cmd_train)

    run = commands.add_parser("run", help="Clasifica y adapta los frames posteriores al entrenamiento")
    run.add_argument("--manifest", required=True)
    run.add_argument("--model", required=True)
    run.add_argument("--mask-dir", required=True)
    run.add_argument("--nu", type=float)
    run.add_argument("--mode", choices=["band", "density"])
    run.add_argument("--threshold", type=float, help="Umbral de densidad para --mode density")
    run.add_argument("--start", type=int, help="Índice del primer frame, por defecto la longitud de la historia")
    _common(run)
    run.set_defaults(handler=cmd_run)

    ev = commands.add_parser("eval", help="Precisión, recall y F1 por píxel")
    ev.add_argument("--pred-dir", required=True)
    ev.add_argument("--manifest", required=True)
    ev.add_argument("--report", required=True)
    _common(ev)
    ev.set_defaults(handler=cmd_eval)

    toy = commands.add_parser("toy", help="Ajuste de dos modos más un tercer modo en streaming")
    toy.add_argument("--seed", type=int)
    toy.add_argument("--report", required=True)
    _common(toy)
    toy.set_defaults(handler=cmd_toy)

    synth = commands.add_parser("synth", help="Genera una secuencia sintética con ground truth")
    synth.add_argument("--spec", required=True)
    synth.add_argument("--out-dir", required=True)
    synth.add_argument("--seed", type=int)
    _common(synth)
    synth.set_defaults(handler=cmd_synth)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = build_settings(args)
    except ValueError as e:
        configure_logging()
        logger.error(f"❌ Configuración inválida: {e}")
        return 1
    configure_logging(config.log_level, config.log_file)
    try:
        args.handler(args, config)
    except ThermalVBError as e:
        logger.error(f"❌ {args.command} falló: {e}")
        return 1
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
