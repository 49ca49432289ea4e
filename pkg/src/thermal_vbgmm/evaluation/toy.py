"""
Experimento de juguete: ajusta una muestra de dos modos y luego pasa un modo
nuevo por la actualización en línea hasta que aparece y se asienta un tercer
componente.
"""
import time
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel

from ..config.settings import Settings, get_settings
from ..core.variational import fit
from ..models.mixture import PointMixture
from ..models.pixel import PixelModel
from ..online.adaptation import adapt

TOY_COLUMNS = ["stage", "samples_seen", "component", "weight", "mean", "std"]

# (media, desviación, muestras)
TRAIN_MODES = ((16.0, 1.5, 50), (50.0, 2.0, 50))
NEW_MODE = (21.0, 1.0)
STREAM_BATCHES = (25, 25)


class ToyStage(BaseModel):
    """Foto de la mezcla tras una etapa del experimento"""
    stage: int
    samples_seen: int
    mixture: PointMixture


def toy_experiment(seed: int = 0, config: Optional[Settings] = None) -> List[ToyStage]:
    """
    La etapa 0 ajusta 100 muestras (50 de N(16, 1.5^2) y 50 de N(50, 2^2));
    las etapas 1 y 2 pasan cada una 25 muestras de N(21, 1) por ``adapt``.

    Todas las muestras salen de un único generador sembrado con ``seed``, en
    el orden: modos de entrenamiento, permutación, lotes en streaming.
    """
    config = config or get_settings()
    start = time.time()
    rng = np.random.default_rng(seed)
    training = np.concatenate([rng.normal(mean, std, n) for mean, std, n in TRAIN_MODES])
    training = rng.permutation(training)

    model = PixelModel.from_history(fit(training, config.k_max, config, seed), training, config.nu)
    stages = [ToyStage(stage=0, samples_seen=training.size, mixture=model.mixture)]
    seen = training.size
    for stage, size in enumerate(STREAM_BATCHES, start=1):
        for x in rng.normal(*NEW_MODE, size):
            adapt(model, float(x), config)
        seen += size
        stages.append(ToyStage(stage=stage, samples_seen=seen, mixture=model.mixture))
        logger.info(f"Etapa {stage}: {model.mixture.n_components} componentes tras {seen} muestras")

    logger.info(f"Experimento de juguete terminado en {time.time() - start:.3f}s")
    return stages


def toy_frame(stages: List[ToyStage]) -> pd.DataFrame:
    rows = [
        {"stage": s.stage, "samples_seen": s.samples_seen, "component": k,
         "weight": w, "mean": mu, "std": sd}
        for s in stages
        for k, (w, mu, sd) in enumerate(zip(s.mixture.weights, s.mixture.means, s.mixture.stds))
    ]
    return pd.DataFrame(rows, columns=TOY_COLUMNS)


def write_toy_report(path: Union[str, Path], stages: List[ToyStage], float_format: str = "%.10g") -> None:
    toy_frame(stages).to_csv(path, index=False, float_format=float_format, lineterminator="\n")
