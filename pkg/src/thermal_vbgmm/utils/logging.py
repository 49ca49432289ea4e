"""
Configuración de logging (loguru)
"""
import sys
from typing import Optional

from loguru import logger

_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} - {name} - {level} - {message}"


def configure_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """
    Instala el sink de stderr y, opcionalmente, uno de fichero.

    Args:
        level: nivel mínimo de todos los sinks
        log_file: sink de fichero adicional, se omite si es None
    """
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format=_FORMAT)
    if log_file:
        logger.add(log_file, level=level.upper(), format=_FORMAT, encoding="utf-8")
