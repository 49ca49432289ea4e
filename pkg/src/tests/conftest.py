"""
Configuración compartida de pytest: pone src/ en el path de importación y
registra la marca ``slow`` (se salta salvo con --run-slow).
"""
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from thermal_vbgmm.config.settings import Settings  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False,
                     help="Ejecuta también los tests marcados como slow")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: tests a escala completa, solo con --run-slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="necesita --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def config():
    """Settings aislados del entorno, con un solo worker"""
    return Settings(_env_file=None, workers=1)


@pytest.fixture
def two_mode_data():
    """50 muestras de N(16, 1.5^2) y 50 de N(50, 2^2), permutadas"""
    rng = np.random.default_rng(7)
    data = np.concatenate([rng.normal(16.0, 1.5, 50), rng.normal(50.0, 2.0, 50)])
    return rng.permutation(data)
