"""
Adaptación en streaming de las mezclas de píxel ajustadas.
"""

from .adaptation import adapt, closest_component, novelty_density, spawn_component, update_matched
from .kernels import Decisions, MixtureArrays, adapt_many, mixture_density_many

__all__ = [
    'adapt',
    'closest_component',
    'novelty_density',
    'spawn_component',
    'update_matched',
    'Decisions',
    'MixtureArrays',
    'adapt_many',
    'mixture_density_many',
]
