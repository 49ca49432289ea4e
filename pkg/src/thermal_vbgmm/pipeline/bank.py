"""
Banco de modelos de fondo por píxel.

Los píxeles se guardan en bloques fijos de ``chunk_size``; cada bloque se
entrena y adapta como un lote de arrays, y los bloques corren en paralelo en un
pool de hilos. Los límites de bloque dependen solo de la configuración, nunca
del número de hilos, así que la salida es la misma para cualquier número de hilos.
"""
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np
from loguru import logger

from ..config.settings import Settings, get_settings
from ..core.variational import fit_many
from ..errors import DimensionMismatchError, InvalidInputError, NumericalFailureError
from ..models.frames import Label, MaskFrame, ThermalFrame
from ..models.pixel import PixelModel
from ..online.adaptation import closest_component
from ..online.kernels import MixtureArrays, adapt_many, closest_many, gaussian_density, mixture_density_many

T = TypeVar("T")


def _check_mode(config: Settings) -> None:
    if config.classification_mode == "density" and config.density_threshold is None:
        raise InvalidInputError("la clasificación por densidad necesita density_threshold")


def foreground_many(state: MixtureArrays, x: np.ndarray, config: Settings) -> np.ndarray:
    """True donde la observación es primer plano según el modo configurado"""
    if config.classification_mode == "density":
        return mixture_density_many(x, state) < config.density_threshold
    _, distance = closest_many(x, state)
    return distance > config.nu


class ModelBank:
    """
    Historias y mezclas de cada píxel de un raster de tamaño fijo.

    El píxel p está en (x, y) = (p % width, p // width). La historia es un anillo de
    N columnas común a todos los píxeles; ``_head`` es la siguiente columna a sobrescribir.
    """

    def __init__(self, width: int, height: int, config: Optional[Settings] = None,
                 history_n: Optional[int] = None):
        if width <= 0 or height <= 0:
            raise InvalidInputError(f"el tamaño del raster debe ser positivo, se recibió {width}x{height}")
        self.config = config or get_settings()
        _check_mode(self.config)
        self.width = width
        self.height = height
        self.n = history_n or self.config.history_n
        if self.n < 2:
            raise InvalidInputError(f"la longitud de la historia debe ser al menos 2, se recibió {self.n}")
        self._history = np.zeros((self.n_pixels, self.n))
        self._head = 0
        self._filled = 0
        self.blocks: List[MixtureArrays] = []
        self.trained = False
        self.frames_processed = 0

    # ------------------------------------------------------------------
    # Disposición
    # ------------------------------------------------------------------

    @property
    def n_pixels(self) -> int:
        return self.width * self.height

    @property
    def ready(self) -> bool:
        return self._filled == self.n

    def slices(self) -> List[slice]:
        step = self.config.chunk_size
        return [slice(start, min(start + step, self.n_pixels)) for start in range(0, self.n_pixels, step)]

    def _locate(self, index: int):
        if not 0 <= index < self.n_pixels:
            raise InvalidInputError(f"índice de píxel {index} fuera de rango")
        return divmod(index, self.config.chunk_size)

    def _map(self, fn: Callable[[int, slice], T]) -> List[T]:
        slices = self.slices()
        workers = min(self.config.effective_workers, len(slices))
        if workers <= 1:
            return [fn(i, sl) for i, sl in enumerate(slices)]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(fn, range(len(slices)), slices))

    def _values(self, frame: ThermalFrame) -> np.ndarray:
        if (frame.width, frame.height) != (self.width, self.height):
            raise DimensionMismatchError((self.width, self.height), (frame.width, frame.height))
        return frame.flat

    def history(self) -> np.ndarray:
        """(píxeles, llenos) observaciones guardadas, de la más antigua a la más reciente"""
        if self._filled < self.n:
            return self._history[:, : self._filled].copy()
        return np.roll(self._history, -self._head, axis=1)

    def _push(self, values: np.ndarray) -> None:
        self._history[:, self._head] = values
        self._head = (self._head + 1) % self.n
        self._filled = min(self._filled + 1, self.n)

    # ------------------------------------------------------------------
    # Entrenamiento
    # ------------------------------------------------------------------

    def accumulate(self, frame: ThermalFrame) -> "ModelBank":
        """Añade un frame a la historia de cada píxel"""
        if self.trained:
            raise InvalidInputError("el banco ya está entrenado")
        if self.ready:
            raise InvalidInputError(f"las historias ya tienen {self.n} frames")
        self._push(self._values(frame))
        return self

    def train(self) -> "ModelBank":
        """Ajusta la historia de cada píxel; el píxel p usa la semilla k-means [config.seed, p]"""
        if self.trained:
            raise InvalidInputError("el banco ya está entrenado")
        if not self.ready:
            raise InvalidInputError(f"las historias tienen {self._filled} de {self.n} frames")
        start = time.time()
        logger.info(f"Entrenando {self.n_pixels} modelos de píxel ({self.width}x{self.height}, N={self.n})")
        history = self.history()

        def train_block(_: int, sl: slice) -> MixtureArrays:
            seeds = [[self.config.seed, p] for p in range(sl.start, sl.stop)]
            try:
                batch = fit_many(history[sl], self.config.k_max, self.config, seeds)
            except NumericalFailureError as e:
                p = sl.start + (e.row or 0)
                raise e.at_pixel(p % self.width, p // self.width) from e
            return MixtureArrays(
                weights=batch.weights.copy(),
                means=batch.means.copy(),
                variances=batch.variances.copy(),
                counts=batch.counts.astype(np.int64),
            )

        self.blocks = self._map(train_block)
        self.trained = True
        counts = self.component_counts()
        logger.info(
            f"Entrenamiento terminado en {time.time() - start:.2f}s "
            f"(componentes: media {counts.mean():.2f}, máximo {counts.max()})"
        )
        return self

    # ------------------------------------------------------------------
    # Fase en línea
    # ------------------------------------------------------------------

    def _require_trained(self) -> None:
        if not self.trained:
            raise InvalidInputError("el banco no está entrenado")

    def classify_frame(self, frame: ThermalFrame) -> MaskFrame:
        """Etiqueta cada píxel sin tocar los modelos"""
        self._require_trained()
        x = self._values(frame)
        foreground = self._map(lambda i, sl: foreground_many(self.blocks[i], x[sl], self.config))
        return MaskFrame(width=self.width, height=self.height, labels=np.concatenate(foreground))

    def process_frame(self, frame: ThermalFrame) -> MaskFrame:
        """Clasifica cada píxel con los modelos actuales, después los adapta y guarda el frame"""
        self._require_trained()
        x = self._values(frame)
        start = time.time()

        def step(i: int, sl: slice):
            block = self.blocks[i]
            foreground = foreground_many(block, x[sl], self.config)
            decision = adapt_many(block, self._history[sl], x[sl], self.n, self.config)
            return foreground, int((~decision.matched).sum())

        results = self._map(step)
        self._push(x)
        self.frames_processed += 1
        labels = np.concatenate([fg for fg, _ in results])
        spawned = sum(s for _, s in results)
        logger.debug(
            f"Frame {self.frames_processed}: {int(labels.sum())} píxeles de primer plano, "
            f"{spawned} componentes creados, {time.time() - start:.3f}s"
        )
        return MaskFrame(width=self.width, height=self.height, labels=labels)

    # ------------------------------------------------------------------
    # Inspección y serialización
    # ------------------------------------------------------------------

    def component_counts(self) -> np.ndarray:
        """Mapa (alto, ancho) del número de componentes"""
        self._require_trained()
        return np.concatenate([b.counts for b in self.blocks]).reshape(self.height, self.width)

    def model(self, index: int) -> PixelModel:
        """Copia del píxel ``index`` como PixelModel independiente"""
        self._require_trained()
        block, row = self._locate(index)
        return PixelModel.from_history(self.blocks[block].mixture(row), self.history()[index], self.config.nu)

    def to_models(self) -> List[PixelModel]:
        return [self.model(p) for p in range(self.n_pixels)]

    def to_arrays(self):
        """Todas las mezclas como un MixtureArrays más la historia, de la más antigua a la más reciente"""
        self._require_trained()
        capacity = max(b.capacity for b in self.blocks)
        state = MixtureArrays.empty(self.n_pixels, capacity)
        for block, sl in zip(self.blocks, self.slices()):
            k = block.capacity
            state.weights[sl, :k] = block.weights
            state.means[sl, :k] = block.means
            state.variances[sl, :k] = block.variances
            state.counts[sl] = block.counts
        return state, self.history()

    @classmethod
    def from_arrays(cls, width: int, height: int, state: MixtureArrays, history: np.ndarray,
                    config: Optional[Settings] = None) -> "ModelBank":
        """Banco entrenado a partir de mezclas guardadas e historias completas (la más antigua primero)"""
        history = np.asarray(history, dtype=np.float64)
        if history.ndim != 2 or history.shape[0] != width * height or state.rows != width * height:
            raise InvalidInputError("se necesita una mezcla y una historia por píxel")
        if np.any(state.counts < 1):
            raise InvalidInputError("cada modelo de píxel necesita al menos un componente")
        bank = cls(width, height, config, history_n=history.shape[1])
        bank._history = history.copy()
        bank._filled = bank.n
        bank._head = 0
        for sl in bank.slices():
            k = int(state.counts[sl].max())
            bank.blocks.append(MixtureArrays(
                weights=state.weights[sl, :k].copy(),
                means=state.means[sl, :k].copy(),
                variances=state.variances[sl, :k].copy(),
                counts=state.counts[sl].copy(),
            ))
        bank.trained = True
        return bank

    @classmethod
    def from_models(cls, width: int, height: int, models: Sequence[PixelModel],
                    config: Optional[Settings] = None) -> "ModelBank":
        if len(models) != width * height:
            raise InvalidInputError(f"{len(models)} modelos para un raster de {width}x{height}")
        lengths = {m.n for m in models}
        if len(lengths) != 1 or any(m.filled != m.n for m in models):
            raise InvalidInputError("cada modelo de píxel necesita una historia completa de la misma longitud")
        state = MixtureArrays.from_mixtures([m.mixture for m in models])
        history = np.stack([m.history() for m in models])
        return cls.from_arrays(width, height, state, history, config)


# ----------------------------------------------------------------------
# Interfaz funcional
# ----------------------------------------------------------------------

def accumulate(bank: ModelBank, frame: ThermalFrame) -> ModelBank:
    return bank.accumulate(frame)


def train(bank: ModelBank) -> ModelBank:
    return bank.train()


def process_frame(bank: ModelBank, frame: ThermalFrame) -> MaskFrame:
    return bank.process_frame(frame)


def classify(model: PixelModel, x: float, mode: str = "band",
             threshold: Optional[float] = None) -> Label:
    """
    Etiqueta una observación frente a un modelo de píxel sin modificarlo.

    "band": fondo si y solo si la distancia de Mahalanobis al componente más
    cercano es como mucho ``model.nu``. "density": fondo si y solo si la densidad
    de la mezcla alcanza ``threshold``.
    """
    if mode == "density":
        if threshold is None or threshold <= 0:
            raise InvalidInputError("la clasificación por densidad necesita un umbral positivo")
        m = model.mixture
        density = float(np.sum(m.weights * gaussian_density(x, m.means, m.variances)))
        return Label.BACKGROUND if density >= threshold else Label.FOREGROUND
    if mode != "band":
        raise InvalidInputError(f"modo de clasificación desconocido {mode!r}")
    _, distance = closest_component(model.mixture, x)
    return Label.BACKGROUND if distance <= model.nu else Label.FOREGROUND


def bank_from_frames(frames: Sequence[ThermalFrame], config: Optional[Settings] = None,
                     history_n: Optional[int] = None) -> ModelBank:
    """Acumula los primeros N frames y entrena"""
    if not frames:
        raise InvalidInputError("no hay frames para entrenar")
    first = frames[0]
    bank = ModelBank(first.width, first.height, config, history_n)
    if len(frames) < bank.n:
        raise InvalidInputError(f"se dieron {len(frames)} frames, se necesitan {bank.n} para entrenar")
    for frame in frames[: bank.n]:
        bank.accumulate(frame)
    return bank.train()
