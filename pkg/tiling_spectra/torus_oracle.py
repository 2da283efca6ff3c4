"""Finite-torus realization of a periodic Laplacian, used as an independent check."""

import logging
from dataclasses import dataclass

import numpy as np

from .floquet import grid_angles, laplacian_spectra
from .periodic_graph import (PeriodicGraph, PreconditionError, WeightAssignment,
                             require_constant_vertex_weight)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TorusOperator:
    """
    Laplacian of the M x M torus of fundamental domains.

    Vertex (c1, c2, v) has index (c1 M + c2) n + v.

    Attributes
    ----------
    cells : int
        M, the number of cells per direction.
    n_vertices : int
        Vertices per fundamental domain.
    mu : float
        Constant vertex weight.
    adjacency : numpy.ndarray
        Real symmetric weighted adjacency matrix.
    matrix : numpy.ndarray
        I - adjacency / mu.

    """

    cells: int
    n_vertices: int
    mu: float
    adjacency: np.ndarray
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_torus(graph: PeriodicGraph, weights: WeightAssignment, cells: int) -> TorusOperator:
    """
    Wrap the periodic graph on an M x M torus.

    Raises
    ------
    PreconditionError
        If M < 3, where wrapped offsets could merge distinct edges, or if the
        vertex weight is not constant.

    """
    if cells < 3:
        raise PreconditionError(f'The torus needs at least 3 cells per direction, got {cells}.')
    mu = require_constant_vertex_weight(graph, weights)
    n = graph.n_vertices
    adjacency = np.zeros((n * cells * cells, n * cells * cells))
    for c1 in range(cells):
        for c2 in range(cells):
            for edge in graph.edges:
                tail = (c1 * cells + c2) * n + edge.tail
                h1 = (c1 + edge.offset.b1) % cells
                h2 = (c2 + edge.offset.b2) % cells
                head = (h1 * cells + h2) * n + edge.head
                adjacency[tail, head] += weights[edge.weight_class]
                adjacency[head, tail] += weights[edge.weight_class]
    logger.info('Torus operator built: %s, M=%d, dimension %d',
                graph.name, cells, adjacency.shape[0])
    return TorusOperator(cells, n, mu, adjacency, np.eye(adjacency.shape[0]) - adjacency / mu)


def torus_spectrum(operator: TorusOperator) -> np.ndarray:
    """Return all eigenvalues of the torus Laplacian, ascending."""
    return np.linalg.eigvalsh(operator.matrix)


def flat_multiplicity(operator: TorusOperator, energy: float, tol: float = 1e-9,
                      spectrum: np.ndarray = None) -> int:
    """Count eigenvalues within ``tol`` of ``energy``."""
    if spectrum is None:
        spectrum = torus_spectrum(operator)
    return int(np.count_nonzero(np.abs(spectrum - energy) <= tol))


def floquet_union_spectrum(graph: PeriodicGraph, weights: WeightAssignment,
                           cells: int) -> np.ndarray:
    """Return the sorted union of Floquet spectra over the grid (2 pi / M) {0..M-1}^2."""
    angles = grid_angles(cells)
    theta1, theta2 = np.meshgrid(angles, angles, indexing='ij')
    return np.sort(laplacian_spectra(graph, weights, theta1, theta2).ravel())


def compare_with_floquet(graph: PeriodicGraph, weights: WeightAssignment, cells: int) -> float:
    """Return the largest pairwise deviation between the torus spectrum and the Floquet union."""
    torus = torus_spectrum(build_torus(graph, weights, cells))
    return float(np.max(np.abs(torus - floquet_union_spectrum(graph, weights, cells))))
