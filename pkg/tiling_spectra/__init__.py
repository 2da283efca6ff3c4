"""Floquet spectra, flat bands and band gaps of weighted Archimedean tilings."""

from .periodic_graph import (EdgeClass, GraphFormatError, LatticeOffset, NoSolutionError,
                             PeriodicGraph, PreconditionError, UnsupportedGraphError,
                             WeightAssignment, WeightError)
from .tilings import builtin

__all__ = [
    'EdgeClass',
    'GraphFormatError',
    'LatticeOffset',
    'NoSolutionError',
    'PeriodicGraph',
    'PreconditionError',
    'UnsupportedGraphError',
    'WeightAssignment',
    'WeightError',
    'builtin',
]
