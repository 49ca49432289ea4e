"""
Excepciones del sistema de sustracción de fondo térmico.
"""
from pathlib import Path
from typing import Optional, Tuple, Union


class ThermalVBError(Exception):
    """Error base del paquete"""


class InvalidInputError(ThermalVBError, ValueError):
    """Entrada rechazada antes de cualquier cálculo"""


class DimensionMismatchError(InvalidInputError):
    """Las dimensiones del raster no coinciden con las configuradas"""

    def __init__(self, expected: Tuple[int, int], got: Tuple[int, int], what: str = "frame"):
        self.expected = expected
        self.got = got
        super().__init__(
            f"{what} mide {got[0]}x{got[1]}, se esperaba {expected[0]}x{expected[1]}"
        )


class NumericalFailureError(ThermalVBError, ArithmeticError):
    """No se pudieron normalizar las responsabilidades de alguna muestra"""

    def __init__(self, sample_index: int, pixel: Optional[Tuple[int, int]] = None, row: Optional[int] = None):
        self.sample_index = sample_index
        self.pixel = pixel
        self.row = row
        where = f" en el píxel (x={pixel[0]}, y={pixel[1]})" if pixel is not None else ""
        super().__init__(f"responsabilidades no finitas para la muestra {sample_index}{where}")

    def at_pixel(self, x: int, y: int) -> "NumericalFailureError":
        return NumericalFailureError(self.sample_index, (x, y), self.row)


class FormatError(ThermalVBError, ValueError):
    """El contenido binario o de texto no sigue su formato"""

    def __init__(self, message: str, path: Union[str, Path, None] = None, offset: Optional[int] = None):
        self.path = str(path) if path is not None else None
        self.offset = offset
        location = ""
        if self.path:
            location += f"{self.path}: "
        if offset is not None:
            location += f"byte {offset}: "
        super().__init__(f"{location}{message}")


class ManifestError(ThermalVBError, ValueError):
    """Manifiesto de secuencia vacío, mal formado o con ficheros inexistentes"""

    def __init__(self, message: str, path: Union[str, Path, None] = None, line: Optional[int] = None):
        self.path = str(path) if path is not None else None
        self.line = line
        location = ""
        if self.path:
            location += f"{self.path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")
