"""Floquet matrices of periodic graphs and band structures over the Brillouin torus."""

import logging
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .periodic_graph import (PeriodicGraph, PreconditionError, WeightAssignment,
                             require_constant_vertex_weight)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
HERMITIAN_TOLERANCE = 1e-14


@dataclass(frozen=True)
class FloquetPoint:
    """Quasi-momentum (theta1, theta2), reduced to [0, 2 pi)."""

    theta1: float = 0.0
    theta2: float = 0.0

    def __post_init__(self):
        for name in ('theta1', 'theta2'):
            value = float(np.mod(getattr(self, name), TWO_PI))
            object.__setattr__(self, name, 0.0 if value >= TWO_PI else value)

    def __iter__(self) -> Iterator[float]:
        return iter((self.theta1, self.theta2))


def _angles(theta) -> Tuple[float, float]:
    theta1, theta2 = theta
    return float(theta1), float(theta2)


def adjacency_batch(graph: PeriodicGraph, weights: WeightAssignment,
                    theta1, theta2) -> np.ndarray:
    """
    Assemble Pi(theta) for arrays of angles.

    Parameters
    ----------
    graph : PeriodicGraph
        The periodic graph.
    weights : WeightAssignment
        Edge weights covering every weight class of ``graph``.
    theta1, theta2 : array_like
        Angles of equal shape S.

    Returns
    -------
    numpy.ndarray
        Complex array of shape S + (n, n).

    """
    weights.covers(graph)
    theta1 = np.asarray(theta1, dtype=float)
    theta2 = np.asarray(theta2, dtype=float)
    n = graph.n_vertices
    matrix = np.zeros(theta1.shape + (n, n), dtype=complex)
    for edge in graph.edges:
        gamma = weights[edge.weight_class]
        phase = np.exp(1j * (edge.offset.b1 * theta1 + edge.offset.b2 * theta2))
        matrix[..., edge.tail, edge.head] += gamma * phase
        matrix[..., edge.head, edge.tail] += gamma * np.conj(phase)
    return matrix


def laplacian_batch(graph: PeriodicGraph, weights: WeightAssignment, theta1, theta2,
                    mu: float = None) -> np.ndarray:
    if mu is None:
        mu = require_constant_vertex_weight(graph, weights)
    return np.eye(graph.n_vertices) - adjacency_batch(graph, weights, theta1, theta2) / mu


def adjacency_matrix(graph: PeriodicGraph, weights: WeightAssignment, theta) -> np.ndarray:
    """Return the Hermitian matrix Pi(theta); entry (t, h) gets gamma exp(i<beta, theta>)."""
    theta1, theta2 = _angles(theta)
    matrix = adjacency_batch(graph, weights, theta1, theta2)
    assert np.max(np.abs(matrix - matrix.conj().T)) <= HERMITIAN_TOLERANCE, \
        'assembled matrix is not Hermitian'
    return matrix


def laplacian(graph: PeriodicGraph, weights: WeightAssignment, theta) -> np.ndarray:
    """
    Return the normalized Floquet Laplacian I - Pi(theta) / mu.

    Raises
    ------
    PreconditionError
        If the vertex weights are not constant.

    """
    mu = require_constant_vertex_weight(graph, weights)
    return np.eye(graph.n_vertices) - adjacency_matrix(graph, weights, theta) / mu


def eigenvalues(matrix) -> np.ndarray:
    """Return the ascending eigenvalues of a Hermitian matrix (or a stack of them)."""
    return np.linalg.eigvalsh(np.asarray(matrix))


def laplacian_spectra(graph: PeriodicGraph, weights: WeightAssignment,
                      theta1, theta2, mu: float = None) -> np.ndarray:
    """Return sorted Laplacian eigenvalues for arrays of angles, shape S + (n,)."""
    return eigenvalues(laplacian_batch(graph, weights, theta1, theta2, mu))


def grid_angles(size: int) -> np.ndarray:
    """Return (2 pi / size) * {0, ..., size - 1}."""
    return TWO_PI * np.arange(size) / size


@dataclass(frozen=True, eq=False)
class BandStructure:
    """
    Laplacian eigenvalues on a uniform K x K grid of the Brillouin torus.

    Attributes
    ----------
    grid_size : int
        K, the number of angles per direction.
    angles : numpy.ndarray
        The K grid angles, shared by both directions.
    levels : numpy.ndarray
        Sorted eigenvalues, shape (K, K, n).

    """

    grid_size: int
    angles: np.ndarray
    levels: np.ndarray

    @property
    def band_ranges(self) -> np.ndarray:
        """Return per-level (min, max), shape (n, 2)."""
        flat = self.levels.reshape(-1, self.levels.shape[-1])
        return np.stack([flat.min(axis=0), flat.max(axis=0)], axis=1)

    def rows(self) -> Iterator[Tuple[float, float, int, float]]:
        """Yield (theta1, theta2, level_index, eigenvalue) in grid index order."""
        size = self.grid_size
        for i1 in range(size):
            for i2 in range(size):
                for level, value in enumerate(self.levels[i1, i2]):
                    yield self.angles[i1], self.angles[i2], level, value

    def union_intervals(self, touch_tol: float = 1e-9) -> List[Tuple[float, float]]:
        return merge_intervals(self.band_ranges, touch_tol)


def band_structure(graph: PeriodicGraph, weights: WeightAssignment,
                   grid_size: int) -> BandStructure:
    """
    Sweep the Laplacian spectrum over the grid (2 pi / K) {0..K-1}^2.

    The grid contains theta = (0, 0), where band extrema at F = 3 sit.
    """
    if grid_size < 3:
        raise PreconditionError(
            f'The grid needs at least 3 points per direction, got {grid_size}.')
    mu = require_constant_vertex_weight(graph, weights)
    angles = grid_angles(grid_size)
    theta1, theta2 = np.meshgrid(angles, angles, indexing='ij')
    logger.info('Sweeping %s over a %dx%d Floquet grid', graph.name, grid_size, grid_size)
    levels = laplacian_spectra(graph, weights, theta1, theta2, mu)
    return BandStructure(grid_size, angles, levels)


def merge_intervals(ranges: Sequence[Sequence[float]],
                    touch_tol: float = 1e-9) -> List[Tuple[float, float]]:
    """Merge closed intervals; intervals closer than ``touch_tol`` are joined."""
    merged = []
    for low, high in sorted((float(lo), float(hi)) for lo, hi in ranges):
        if merged and low <= merged[-1][1] + touch_tol:
            merged[-1] = (merged[-1][0], max(merged[-1][1], high))
        else:
            merged.append((low, high))
    return merged


def f_kagome(theta):
    """Return cos(theta1) + cos(theta2) + cos(theta1 - theta2)."""
    theta1, theta2 = theta
    return np.cos(theta1) + np.cos(theta2) + np.cos(np.subtract(theta1, theta2))


def f_superkagome(theta):
    """Return cos(theta1) + cos(theta2) + cos(theta1 + theta2)."""
    theta1, theta2 = theta
    return np.cos(theta1) + np.cos(theta2) + np.cos(np.add(theta1, theta2))
