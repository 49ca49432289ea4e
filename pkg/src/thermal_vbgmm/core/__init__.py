"""
Ajuste bayesiano variacional de mezclas Gaussianas por píxel.
"""

from .kmeans import kmeans_many, kmeans_seed
from .merge import merge_redundant, sort_by_mean
from .special import digamma
from .variational import FitBatch, e_step, fit, fit_many, fit_report, init_hyperparams, m_step

__all__ = [
    'digamma',
    'kmeans_seed',
    'kmeans_many',
    'init_hyperparams',
    'e_step',
    'm_step',
    'fit',
    'fit_report',
    'fit_many',
    'FitBatch',
    'merge_redundant',
    'sort_by_mean',
]
