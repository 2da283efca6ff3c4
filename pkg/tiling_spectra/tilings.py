"""
The eleven Archimedean tilings as periodic graphs.

Kagome (3.6.3.6) and Super-Kagome (3.12.12) are given edge by edge, with the
vertex labels and weight classes used throughout the package. The other nine
tilings are generated from unit-edge coordinates: every pair of vertices at
distance one is an edge, and each edge gets its own weight class.
"""

import dataclasses
import logging
import math
from typing import Dict, List, Sequence, Tuple

from .periodic_graph import (EdgeClass, GraphFormatError, LatticeOffset, PeriodicGraph,
                             half_edge_angles)

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)

KAGOME = 'kagome'
SUPER_KAGOME = 'super_kagome'

ALIASES = {'33336': '3336', '4^4': 'square', '3^6': 'triangular', '6^3': 'hexagonal'}

# name -> (degree, faces per fundamental domain)
EXPECTED_SHAPE = {
    'square': (4, 1),
    'triangular': (6, 2),
    'hexagonal': (3, 1),
    '33434': (5, 6),
    '3344': (5, 3),
    '488': (3, 2),
    '3464': (4, 6),
    '4612': (3, 6),
    '3336': (5, 9),
    KAGOME: (4, 3),
    SUPER_KAGOME: (3, 3),
}

Point = Tuple[float, float]


def _polygon(count: int, radius: float, start_deg: float) -> List[Point]:
    return [(radius * math.cos(math.radians(start_deg + 360.0 * k / count)),
             radius * math.sin(math.radians(start_deg + 360.0 * k / count)))
            for k in range(count)]


def _scaled(vectors: Sequence[Point], factor: float) -> Tuple[Point, Point]:
    return tuple((factor * x, factor * y) for x, y in vectors)


def _generated_tables() -> Dict[str, Tuple[Tuple[Point, Point], List[Point]]]:
    hexagonal_axes = ((1.0, 0.0), (0.5, SQRT3 / 2))
    octagon_side = 1.0 + SQRT2
    snub_side = math.sqrt(2.0 + SQRT3)
    snub_radius = 1.0 / SQRT2
    return {
        'square': (((1.0, 0.0), (0.0, 1.0)), [(0.0, 0.0)]),
        'triangular': (hexagonal_axes, [(0.0, 0.0)]),
        'hexagonal': (((SQRT3, 0.0), (SQRT3 / 2, 1.5)), [(0.0, 0.0), (0.0, 1.0)]),
        '488': (((octagon_side, 0.0), (0.0, octagon_side)),
                _polygon(4, 1.0 / SQRT2, 0.0)),
        '3464': (_scaled(hexagonal_axes, 1.0 + SQRT3), _polygon(6, 1.0, 30.0)),
        '4612': (_scaled(hexagonal_axes, 3.0 + SQRT3),
                 _polygon(12, 1.0 / (2.0 * math.sin(math.radians(15.0))), 15.0)),
        '33434': (((snub_side, 0.0), (0.0, snub_side)),
                  [(snub_radius * math.cos(math.radians(deg)),
                    snub_radius * math.sin(math.radians(deg)))
                   for deg in (60.0, 150.0, 240.0, 330.0)]),
        '3344': (((1.0, 0.0), (0.5, 1.0 + SQRT3 / 2)), [(0.0, 0.0), (0.0, 1.0)]),
        '3336': (((2.5, SQRT3 / 2), (0.5, 1.5 * SQRT3)), _polygon(6, 1.0, 0.0)),
    }


def _head_position(positions, basis, vertex: int, offset: LatticeOffset) -> Point:
    x, y = positions[vertex]
    return (x + offset.b1 * basis[0][0] + offset.b2 * basis[1][0],
            y + offset.b1 * basis[0][1] + offset.b2 * basis[1][1])


def unit_edges(positions: Sequence[Point], basis, tol: float = 1e-9) -> List[EdgeClass]:
    """
    Find every pair of vertices at unit distance.

    Offsets are searched in {-1, 0, 1}^2. Loops keep only the
    lexicographically positive offset, so every edge orbit appears once.
    """
    edges = []
    for tail in range(len(positions)):
        for head in range(tail, len(positions)):
            for b1 in (-1, 0, 1):
                for b2 in (-1, 0, 1):
                    offset = LatticeOffset(b1, b2)
                    if tail == head and offset <= LatticeOffset(0, 0):
                        continue
                    hx, hy = _head_position(positions, basis, head, offset)
                    tx, ty = positions[tail]
                    if abs(math.hypot(hx - tx, hy - ty) - 1.0) < tol:
                        edges.append(EdgeClass(tail, head, offset, f'g{len(edges) + 1}'))
    return edges


def _from_table(name: str, basis, positions, edges) -> PeriodicGraph:
    bare = PeriodicGraph.from_edges(name, len(positions), edges, None, positions, basis)
    order = tuple(tuple(index for _, index in half_edge_angles(bare, v))
                  for v in range(bare.n_vertices))
    graph = dataclasses.replace(bare, cyclic_order=order)
    degree, faces = EXPECTED_SHAPE[name]
    degrees = {graph.degree(v) for v in range(graph.n_vertices)}
    assert degrees == {degree}, f'{name}: vertex degrees {sorted(degrees)}, expected {degree}'
    # Euler characteristic of the torus: V - E + F = 0
    assert len(graph.edges) - graph.n_vertices == faces, f'{name}: wrong face count'
    return graph


def _kagome() -> PeriodicGraph:
    basis = ((2.0, 0.0), (1.0, SQRT3))
    positions = [(0.5, SQRT3 / 2), (-0.5, SQRT3 / 2), (-1.0, 0.0)]
    edges = [
        EdgeClass(0, 1, LatticeOffset(0, 0), 'g3'),
        EdgeClass(0, 1, LatticeOffset(1, 0), 'g6'),
        EdgeClass(0, 2, LatticeOffset(1, 0), 'g4'),
        EdgeClass(0, 2, LatticeOffset(0, 1), 'g1'),
        EdgeClass(1, 2, LatticeOffset(0, 0), 'g2'),
        EdgeClass(1, 2, LatticeOffset(0, 1), 'g5'),
    ]
    return _from_table(KAGOME, basis, positions, edges)


def _super_kagome() -> PeriodicGraph:
    reach = 1.0 + SQRT3 / 2
    basis = ((reach, 1.5 + SQRT3), (-reach, 1.5 + SQRT3))
    positions = [(-0.5, reach), (0.5, reach), (0.0, 1.0),
                 (0.0, 0.0), (0.5, -SQRT3 / 2), (-0.5, -SQRT3 / 2)]
    edges = [
        EdgeClass(0, 1, LatticeOffset(0, 0), 'g4'),
        EdgeClass(0, 2, LatticeOffset(0, 0), 'g6'),
        EdgeClass(0, 4, LatticeOffset(0, 1), 'g9'),
        EdgeClass(1, 2, LatticeOffset(0, 0), 'g5'),
        EdgeClass(1, 5, LatticeOffset(1, 0), 'g8'),
        EdgeClass(2, 3, LatticeOffset(0, 0), 'g7'),
        EdgeClass(3, 4, LatticeOffset(0, 0), 'g3'),
        EdgeClass(3, 5, LatticeOffset(0, 0), 'g2'),
        EdgeClass(4, 5, LatticeOffset(0, 0), 'g1'),
    ]
    return _from_table(SUPER_KAGOME, basis, positions, edges)


def names() -> Tuple[str, ...]:
    return tuple(EXPECTED_SHAPE)


def builtin(name: str) -> PeriodicGraph:
    """
    Return a built-in Archimedean tiling.

    Parameters
    ----------
    name : str
        One of kagome, super_kagome, square, triangular, hexagonal, 33434,
        3344, 488, 3464, 4612 or 3336 (also accepted as 33336).

    """
    key = ALIASES.get(name, name)
    if key == KAGOME:
        return _kagome()
    if key == SUPER_KAGOME:
        return _super_kagome()
    tables = _generated_tables()
    if key not in tables:
        raise GraphFormatError(
            f'Unknown tiling {name!r}; choose one of {", ".join(names())}.')
    basis, positions = tables[key]
    graph = _from_table(key, basis, positions, unit_edges(positions, basis))
    logger.debug('Built %s: %d vertices, %d edge classes',
                 key, graph.n_vertices, len(graph.edges))
    return graph


def other_tilings() -> Tuple[str, ...]:
    """Name the tilings that have no flat band for any periodic weights."""
    return tuple(n for n in names() if n not in (KAGOME, SUPER_KAGOME))
