"""
Z^2-periodic weighted graphs.

A periodic graph is stored through one fundamental domain: its vertices and
one representative of every orbit of edges, each carrying the lattice
translation applied to its head vertex. Edge weights are attached to weight
classes, so several edges may share one weight.
"""

import json
import logging
import math
import re
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

logger = logging.getLogger(__name__)

RELATIVE_TOLERANCE = 1e-12
ANGLE_TOLERANCE = 1e-9


class GraphFormatError(ValueError):
    """Malformed graph or weight data."""


class WeightError(ValueError):
    """Missing, non-positive or non-finite edge weight."""


class UnsupportedGraphError(ValueError):
    """The graph lacks data an operation needs."""


class NoSolutionError(ValueError):
    """The constant vertex weight system has no solution."""


class PreconditionError(ValueError):
    """An operation was called outside of its domain."""


def natural_key(label: str) -> tuple:
    """Sort key that orders 'g2' before 'g10'."""
    return tuple(int(part) if part.isdigit() else part
                 for part in re.split(r'(\d+)', label))


@dataclass(frozen=True, order=True)
class LatticeOffset:
    """Translation (b1, b2) applied to the head vertex of an edge."""

    b1: int = 0
    b2: int = 0

    def __neg__(self) -> 'LatticeOffset':
        return LatticeOffset(-self.b1, -self.b2)

    def is_zero(self) -> bool:
        return self.b1 == 0 and self.b2 == 0

    def as_list(self) -> List[int]:
        return [self.b1, self.b2]

    def norm(self) -> int:
        """Return the Chebyshev length of the offset."""
        return max(abs(self.b1), abs(self.b2))


@dataclass(frozen=True)
class EdgeClass:
    """
    One orbit of undirected edges: tail ~ head + offset.

    Attributes
    ----------
    tail : int
        Vertex index in the fundamental domain.
    head : int
        Vertex index in the fundamental domain.
    offset : LatticeOffset
        Translation of the head vertex.
    weight_class : str
        Label of the weight carried by the edge.

    """

    tail: int
    head: int
    offset: LatticeOffset
    weight_class: str

    def is_loop(self) -> bool:
        return self.tail == self.head

    def reversed(self) -> 'EdgeClass':
        return EdgeClass(self.head, self.tail, -self.offset, self.weight_class)

    def canonical(self) -> 'EdgeClass':
        """Orient so that tail <= head, and loops point along a positive offset."""
        if self.tail > self.head:
            return self.reversed()
        if self.tail == self.head and self.offset < LatticeOffset(0, 0):
            return self.reversed()
        return self

    def sort_key(self) -> Tuple[int, int, int, int]:
        return (self.tail, self.head, self.offset.b1, self.offset.b2)


@dataclass(frozen=True)
class PeriodicGraph:
    """
    Fundamental domain of a Z^2-periodic graph.

    Build instances with ``PeriodicGraph.from_edges`` so that edges are put in
    canonical orientation and order; the constructor only validates.

    Attributes
    ----------
    name : str
        Name of the tiling or graph.
    n_vertices : int
        Number of vertices in the fundamental domain.
    edges : tuple of EdgeClass
        Canonical edge classes sorted by (tail, head, offset).
    cyclic_order : tuple of tuple of int, optional
        Counterclockwise edge indices around every vertex. A loop class
        appears twice at its vertex.
    positions : tuple of (float, float), optional
        Plot coordinates of the fundamental domain vertices.
    basis : tuple of (float, float), optional
        Lattice vectors omega_1 and omega_2 for plotting.

    """

    name: str
    n_vertices: int
    edges: Tuple[EdgeClass, ...]
    cyclic_order: Optional[Tuple[Tuple[int, ...], ...]] = None
    positions: Optional[Tuple[Tuple[float, float], ...]] = None
    basis: Optional[Tuple[Tuple[float, float], Tuple[float, float]]] = None

    def __post_init__(self):
        if self.n_vertices < 1:
            raise GraphFormatError('A graph needs at least one vertex.')
        seen = set()
        for index, edge in enumerate(self.edges):
            for vertex in (edge.tail, edge.head):
                if not 0 <= vertex < self.n_vertices:
                    raise GraphFormatError(
                        f'Edge {index} references vertex {vertex}, '
                        f'but the graph has {self.n_vertices} vertices.')
            if edge.is_loop() and edge.offset.is_zero():
                raise GraphFormatError(f'Edge {index} joins a vertex to itself.')
            if edge != edge.canonical():
                raise GraphFormatError(f'Edge {index} is not in canonical orientation.')
            if edge.sort_key() in seen:
                raise GraphFormatError(f'Edge {index} is a duplicate.')
            seen.add(edge.sort_key())
        for vertex in range(self.n_vertices):
            if not self.incidence(vertex):
                raise GraphFormatError(f'Vertex {vertex} has no incident edge.')
        if self.cyclic_order is not None:
            if len(self.cyclic_order) != self.n_vertices:
                raise GraphFormatError('The cyclic order must list every vertex.')
            for vertex, order in enumerate(self.cyclic_order):
                if sorted(order) != sorted(self.incidence(vertex)):
                    raise GraphFormatError(
                        f'The cyclic order at vertex {vertex} does not list '
                        'its incident edges exactly once.')
        self._check_embedding()

    def _check_embedding(self):
        if (self.positions is None) != (self.basis is None):
            raise GraphFormatError('An embedding needs both positions and a basis.')
        if self.positions is None:
            return
        if len(self.positions) != self.n_vertices:
            raise GraphFormatError(
                f'The embedding has {len(self.positions)} positions '
                f'for {self.n_vertices} vertices.')
        if len(self.basis) != 2:
            raise GraphFormatError('The basis needs exactly two lattice vectors.')
        try:
            coordinates = np.array(tuple(self.positions) + tuple(self.basis), dtype=float)
        except (TypeError, ValueError):
            coordinates = np.zeros(0)
        if coordinates.shape[1:] != (2,) or not np.all(np.isfinite(coordinates)):
            raise GraphFormatError('Positions and basis vectors must be finite pairs.')
        if abs(np.linalg.det(coordinates[-2:])) <= RELATIVE_TOLERANCE:
            raise GraphFormatError('The basis vectors are parallel.')

    @classmethod
    def from_edges(cls, name: str, n_vertices: int, edges: Sequence[EdgeClass],
                   cyclic_order: Optional[Sequence[Sequence[int]]] = None,
                   positions=None, basis=None) -> 'PeriodicGraph':
        """
        Canonicalize and sort edges, remapping cyclic orders to the new indices.

        Parameters
        ----------
        name : str
            Graph name.
        n_vertices : int
            Size of the fundamental domain.
        edges : sequence of EdgeClass
            Edges in any orientation and order.
        cyclic_order : sequence of sequence of int, optional
            Counterclockwise incident edge indices, referring to ``edges``.
        positions, basis : optional
            Plot embedding.

        """
        canonical = [edge.canonical() for edge in edges]
        ranking = sorted(range(len(canonical)), key=lambda i: canonical[i].sort_key())
        new_index = {old: new for new, old in enumerate(ranking)}
        order = None
        if cyclic_order is not None:
            try:
                order = tuple(tuple(new_index[i] for i in around)
                              for around in cyclic_order)
            except KeyError as exc:
                raise GraphFormatError(
                    f'The cyclic order references unknown edge {exc.args[0]}.') from None
            except TypeError:
                raise GraphFormatError(
                    'The cyclic order must list edge indices for every vertex.') from None
        try:
            if positions is not None:
                positions = tuple((float(x), float(y)) for x, y in positions)
            if basis is not None:
                basis = tuple((float(x), float(y)) for x, y in basis)
        except (TypeError, ValueError):
            raise GraphFormatError('Positions and basis vectors must be number pairs.') from None
        return cls(name=name, n_vertices=int(n_vertices),
                   edges=tuple(canonical[i] for i in ranking),
                   cyclic_order=order, positions=positions, basis=basis)

    @property
    def weight_classes(self) -> Tuple[str, ...]:
        return tuple(sorted({edge.weight_class for edge in self.edges}, key=natural_key))

    @property
    def max_offset(self) -> int:
        return max(edge.offset.norm() for edge in self.edges)

    def incidence(self, vertex: int) -> List[int]:
        """List the edge indices incident to ``vertex``; loops are listed twice."""
        incident = []
        for index, edge in enumerate(self.edges):
            if edge.tail == vertex:
                incident.append(index)
            if edge.head == vertex:
                incident.append(index)
        return incident

    def degree(self, vertex: int) -> int:
        return len(self.incidence(vertex))

    def incidence_matrix(self) -> np.ndarray:
        """Count incidences per vertex (rows) and weight class (columns)."""
        classes = {label: j for j, label in enumerate(self.weight_classes)}
        matrix = np.zeros((self.n_vertices, len(classes)))
        for edge in self.edges:
            matrix[edge.tail, classes[edge.weight_class]] += 1
            matrix[edge.head, classes[edge.weight_class]] += 1
        return matrix


@dataclass(frozen=True)
class WeightAssignment:
    """Strictly positive weight for every weight class."""

    weights: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        checked = {}
        for label, value in self.weights.items():
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise WeightError(f'Weight {label!r} is not a number.') from None
            if not math.isfinite(value) or value <= 0:
                raise WeightError(f'Weight {label!r} must be positive and finite, got {value}.')
            checked[str(label)] = value
        object.__setattr__(self, 'weights', checked)

    def __getitem__(self, label: str) -> float:
        try:
            return self.weights[label]
        except KeyError:
            raise WeightError(f'No weight given for class {label!r}.') from None

    def covers(self, graph: PeriodicGraph) -> None:
        """Raise WeightError unless every weight class of ``graph`` has a weight."""
        missing = [label for label in graph.weight_classes if label not in self.weights]
        if missing:
            raise WeightError(f'No weight given for classes {", ".join(missing)}.')

    def vector(self, labels: Sequence[str]) -> np.ndarray:
        return np.array([self[label] for label in labels])

    def scaled(self, factor: float) -> 'WeightAssignment':
        return WeightAssignment({k: v * factor for k, v in self.weights.items()})

    @classmethod
    def from_vector(cls, labels: Sequence[str], values) -> 'WeightAssignment':
        return cls(dict(zip(labels, (float(v) for v in values))))

    @classmethod
    def uniform(cls, graph: PeriodicGraph, value: float = 1.0) -> 'WeightAssignment':
        return cls({label: value for label in graph.weight_classes})


def vertex_weight(graph: PeriodicGraph, weights: WeightAssignment, vertex: int) -> float:
    """
    Sum of the weights of the edges incident to ``vertex``.

    Edges are summed in edge index order; a loop class counts at both of its
    ends.
    """
    if not 0 <= vertex < graph.n_vertices:
        raise PreconditionError(f'Vertex {vertex} is not in the fundamental domain.')
    weights.covers(graph)
    total = 0.0
    for edge in graph.edges:
        if edge.tail == vertex:
            total += weights[edge.weight_class]
        if edge.head == vertex:
            total += weights[edge.weight_class]
    return total


def vertex_weights(graph: PeriodicGraph, weights: WeightAssignment) -> List[float]:
    return [vertex_weight(graph, weights, v) for v in range(graph.n_vertices)]


def constant_vertex_weight(graph: PeriodicGraph, weights: WeightAssignment) -> Optional[float]:
    """Return mu if all vertex weights agree to a relative 1e-12, else None."""
    mus = vertex_weights(graph, weights)
    reference = mus[0]
    if all(abs(mu - reference) <= RELATIVE_TOLERANCE * reference for mu in mus):
        return reference
    return None


def require_constant_vertex_weight(graph: PeriodicGraph, weights: WeightAssignment) -> float:
    """Return mu or raise PreconditionError for non-constant vertex weights."""
    mu = constant_vertex_weight(graph, weights)
    if mu is None:
        spread = ', '.join(f'{m:.12g}' for m in vertex_weights(graph, weights))
        raise PreconditionError(
            f'Vertex weights of {graph.name} are not constant ({spread}); '
            'the normalized Laplacian needs a constant vertex weight.')
    return mu


def half_edge_angles(graph: PeriodicGraph, vertex: int) -> List[Tuple[float, int]]:
    """
    Return (angle, edge index) for every edge leaving ``vertex``, sorted by angle.

    Angles lie in [0, 2 pi) and come from the embedding; a loop leaves its
    vertex in two directions.
    """
    if graph.positions is None or graph.basis is None:
        raise UnsupportedGraphError(f'Graph {graph.name} carries no embedding.')
    (a1, a2), (c1, c2) = graph.basis
    x0, y0 = graph.positions[vertex]
    found = []
    for index, edge in enumerate(graph.edges):
        for start, end, offset in ((edge.tail, edge.head, edge.offset),
                                   (edge.head, edge.tail, -edge.offset)):
            if start != vertex:
                continue
            x, y = graph.positions[end]
            dx = x + offset.b1 * a1 + offset.b2 * c1 - x0
            dy = y + offset.b1 * a2 + offset.b2 * c2 - y0
            found.append((math.atan2(dy, dx) % (2 * math.pi), index))
    return sorted(found)


def _vertex_figure(graph: PeriodicGraph, weights: WeightAssignment, vertex: int) -> np.ndarray:
    """Return rows (weight, angle to the next edge) counterclockwise around ``vertex``."""
    around = half_edge_angles(graph, vertex)
    angles = [angle for angle, _ in around]
    gaps = np.diff(angles + [angles[0] + 2 * math.pi])
    gammas = [weights[graph.edges[index].weight_class] for _, index in around]
    return np.column_stack([gammas, gaps])


def _same_up_to_rotation(first: np.ndarray, second: np.ndarray) -> bool:
    if first.shape != second.shape:
        return False
    for shift in range(len(second)):
        rolled = np.roll(second, shift, axis=0)
        if not np.allclose(first[:, 0], rolled[:, 0], rtol=RELATIVE_TOLERANCE, atol=0.0):
            continue
        if np.allclose(first[:, 1:], rolled[:, 1:], rtol=0.0, atol=ANGLE_TOLERANCE):
            return True
    return False


def is_monomeric(graph: PeriodicGraph, weights: WeightAssignment) -> bool:
    """
    Check whether the cyclic weight sequences agree at every vertex.

    Sequences are compared up to cyclic rotation only; reflections do not
    count. With an embedding, the rotation must also match the angles between
    consecutive edges, so edges only pair up with edges in the same position
    of the vertex figure.
    """
    if graph.cyclic_order is None:
        raise UnsupportedGraphError(f'Graph {graph.name} carries no cyclic order.')
    weights.covers(graph)
    if graph.positions is not None and graph.basis is not None:
        sequences = [_vertex_figure(graph, weights, v) for v in range(graph.n_vertices)]
    else:
        sequences = [np.array([[weights[graph.edges[i].weight_class]] for i in order])
                     for order in graph.cyclic_order]
    return all(_same_up_to_rotation(sequences[0], seq) for seq in sequences[1:])


@dataclass(frozen=True, eq=False)
class WeightParametrization:
    """
    Affine description of the weights with constant vertex weight mu.

    Points are ``particular + basis @ coefficients``; admissible points have
    every coordinate strictly positive.

    Attributes
    ----------
    labels : tuple of str
        Weight classes, in the order of the coordinates.
    mu : float
        Prescribed vertex weight.
    particular : numpy.ndarray
        Minimum-norm solution of the vertex weight equations.
    basis : numpy.ndarray
        Orthonormal columns spanning the homogeneous solutions.
    incidence : numpy.ndarray
        Vertex by weight-class incidence counts.

    """

    labels: Tuple[str, ...]
    mu: float
    particular: np.ndarray
    basis: np.ndarray
    incidence: np.ndarray

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    def point(self, coefficients) -> np.ndarray:
        coefficients = np.asarray(coefficients, dtype=float)
        return self.particular + self.basis @ coefficients

    def weights(self, coefficients) -> WeightAssignment:
        return WeightAssignment.from_vector(self.labels, self.point(coefficients))

    def residual(self, gammas) -> float:
        """Return the largest violation of the vertex weight equations."""
        return float(np.max(np.abs(self.incidence @ np.asarray(gammas) - self.mu)))

    def coefficient_bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return the bounding box of admissible coefficients, from 0 < gamma <= mu."""
        low = np.minimum(-self.particular, self.mu - self.particular)
        high = np.maximum(-self.particular, self.mu - self.particular)
        # coefficients = basis.T @ (gamma - particular) for orthonormal columns
        lower = np.where(self.basis > 0, self.basis * low[:, None], self.basis * high[:, None])
        upper = np.where(self.basis > 0, self.basis * high[:, None], self.basis * low[:, None])
        return lower.sum(axis=0), upper.sum(axis=0)

    def sample(self, rng: np.random.Generator, count: int,
               batch: int = 4096, max_batches: int = 10000) -> List[WeightAssignment]:
        """
        Draw admissible weight assignments uniformly by rejection.

        Parameters
        ----------
        rng : numpy.random.Generator
            Source of randomness.
        count : int
            Number of assignments to return.
        batch : int
            Candidates drawn per round.
        max_batches : int
            Give up after this many rounds.

        """
        if self.dimension == 0:
            if np.all(self.particular > 0):
                return [self.weights([]) for _ in range(count)]
            raise NoSolutionError('The only solution has a non-positive weight.')
        lower, upper = self.coefficient_bounds()
        accepted = []
        for _ in range(max_batches):
            coefficients = rng.uniform(lower, upper, size=(batch, self.dimension))
            points = self.particular + coefficients @ self.basis.T
            for row in points[np.all(points > 0, axis=1)]:
                accepted.append(WeightAssignment.from_vector(self.labels, row))
                if len(accepted) == count:
                    return accepted
        raise NoSolutionError(
            f'Found only {len(accepted)} positive points in {max_batches} batches.')


def constant_weight_parametrization(graph: PeriodicGraph, mu: float) -> WeightParametrization:
    """
    Solve the vertex weight equations sum_{e at v} gamma_e = mu.

    The dimension of the returned family is the number of weight classes
    minus the rank of the incidence matrix.
    """
    if mu <= 0:
        raise PreconditionError(f'The vertex weight must be positive, got {mu}.')
    incidence = graph.incidence_matrix()
    target = np.full(graph.n_vertices, float(mu))
    particular = np.linalg.lstsq(incidence, target, rcond=None)[0]
    scale = incidence.shape[1] * mu
    if np.max(np.abs(incidence @ particular - target)) > RELATIVE_TOLERANCE * scale:
        raise NoSolutionError(f'No weights on {graph.name} give every vertex weight {mu}.')
    basis = scipy.linalg.null_space(incidence)
    logger.debug('Constant weight family on %s has dimension %d',
                 graph.name, basis.shape[1])
    return WeightParametrization(graph.weight_classes, float(mu), particular, basis, incidence)


def _graph_record(graph: PeriodicGraph) -> dict:
    record = {
        'name': graph.name,
        'vertices': graph.n_vertices,
        'edges': [{'tail': e.tail, 'head': e.head, 'offset': e.offset.as_list(),
                   'class': e.weight_class} for e in graph.edges],
        'cyclic_order': None if graph.cyclic_order is None
        else [list(order) for order in graph.cyclic_order],
    }
    if graph.positions is not None and graph.basis is not None:
        record['embedding'] = {'positions': [list(p) for p in graph.positions],
                               'basis': [list(b) for b in graph.basis]}
    return record


def save_graph(graph: PeriodicGraph, path) -> None:
    """Write ``graph`` as UTF-8 JSON with edges in canonical order."""
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(_graph_record(graph), handle, indent=2)
        handle.write('\n')


def _integer(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise GraphFormatError(f'{what} must be an integer, got {value!r}.')
    return value


def graph_from_record(record: Mapping) -> PeriodicGraph:
    """Build a graph from a parsed graph file record."""
    try:
        name = str(record['name'])
        n_vertices = _integer(record['vertices'], 'vertices')
        edges = []
        for item in record['edges']:
            b1, b2 = item['offset']
            edges.append(EdgeClass(_integer(item['tail'], 'tail'),
                                   _integer(item['head'], 'head'),
                                   LatticeOffset(_integer(b1, 'offset'), _integer(b2, 'offset')),
                                   str(item['class'])))
        embedding = record.get('embedding') or {}
        if not isinstance(embedding, Mapping):
            raise GraphFormatError('The embedding must be an object with positions and basis.')
        return PeriodicGraph.from_edges(name, n_vertices, edges, record.get('cyclic_order'),
                                        embedding.get('positions'), embedding.get('basis'))
    except (AttributeError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GraphFormatError):
            raise
        raise GraphFormatError(f'Malformed graph record: {exc!r}') from None


def load_graph(path) -> PeriodicGraph:
    """Read a graph file written by ``save_graph`` (or by hand)."""
    try:
        with open(path, encoding='utf-8') as handle:
            record = json.load(handle)
    except ValueError as exc:
        # JSONDecodeError and UnicodeDecodeError
        raise GraphFormatError(f'{path} is not valid JSON: {exc}') from None
    graph = graph_from_record(record)
    logger.info('Loaded graph %s with %d vertices and %d edge classes',
                graph.name, graph.n_vertices, len(graph.edges))
    return graph


def save_weights(weights: WeightAssignment, path) -> None:
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump({k: weights.weights[k] for k in sorted(weights.weights, key=natural_key)},
                  handle, indent=2)
        handle.write('\n')


def load_weights(path) -> WeightAssignment:
    """Read a weight file: a JSON object mapping class label to a positive number."""
    try:
        with open(path, encoding='utf-8') as handle:
            record = json.load(handle)
    except ValueError as exc:
        # JSONDecodeError and UnicodeDecodeError
        raise GraphFormatError(f'{path} is not valid JSON: {exc}') from None
    if not isinstance(record, dict):
        raise GraphFormatError(f'{path} must hold an object of class weights.')
    return WeightAssignment(record)
