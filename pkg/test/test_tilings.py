import math

import numpy as np
import pytest

from tiling_spectra.periodic_graph import GraphFormatError, half_edge_angles
from tiling_spectra.tilings import EXPECTED_SHAPE, builtin, names, other_tilings


def _edge_length(graph, edge):
    (b11, b12), (b21, b22) = graph.basis
    tx, ty = graph.positions[edge.tail]
    hx, hy = graph.positions[edge.head]
    hx += edge.offset.b1 * b11 + edge.offset.b2 * b21
    hy += edge.offset.b1 * b12 + edge.offset.b2 * b22
    return math.hypot(hx - tx, hy - ty)


def test_eleven_tilings():
    assert len(names()) == 11
    assert len(other_tilings()) == 9
    assert 'kagome' not in other_tilings()


@pytest.mark.parametrize('name', names())
def test_degree_and_face_count(name):
    graph = builtin(name)
    degree, faces = EXPECTED_SHAPE[name]
    assert all(graph.degree(v) == degree for v in range(graph.n_vertices))
    assert len(graph.edges) - graph.n_vertices == faces


@pytest.mark.parametrize('name', names())
def test_embedding_has_unit_edges(name):
    graph = builtin(name)
    for edge in graph.edges:
        assert _edge_length(graph, edge) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize('name', names())
def test_cyclic_order_lists_incident_edges(name):
    graph = builtin(name)
    assert len(graph.cyclic_order) == graph.n_vertices
    for vertex, order in enumerate(graph.cyclic_order):
        assert sorted(order) == sorted(graph.incidence(vertex))


@pytest.mark.parametrize('name, vertices, edges', [
    ('kagome', 3, 6),
    ('super_kagome', 6, 9),
    ('square', 1, 2),
    ('triangular', 1, 3),
    ('hexagonal', 2, 3),
    ('4612', 12, 18),
    ('3336', 6, 15),
])
def test_fundamental_domain_sizes(name, vertices, edges):
    graph = builtin(name)
    assert graph.n_vertices == vertices
    assert len(graph.edges) == edges


def test_kagome_weight_classes():
    graph = builtin('kagome')
    assert graph.weight_classes == ('g1', 'g2', 'g3', 'g4', 'g5', 'g6')
    assert all(edge.offset.norm() <= 1 for edge in graph.edges)


def test_super_kagome_weight_classes():
    graph = builtin('super_kagome')
    assert graph.weight_classes == tuple(f'g{i}' for i in range(1, 10))
    links = {edge.weight_class for edge in graph.edges if edge.offset.norm() > 0}
    assert links == {'g8', 'g9'}


@pytest.mark.parametrize('alias, name', [
    ('33336', '3336'), ('4^4', 'square'), ('3^6', 'triangular'), ('6^3', 'hexagonal'),
])
def test_aliases(alias, name):
    assert builtin(alias) == builtin(name)


def test_unknown_tiling():
    with pytest.raises(GraphFormatError, match='Unknown tiling'):
        builtin('penrose')


@pytest.mark.parametrize('name, gaps', [
    ('kagome', [60, 60, 120, 120]),
    ('super_kagome', [60, 150, 150]),
    ('4612', [90, 120, 150]),
])
def test_vertex_figures(name, gaps):
    graph = builtin(name)
    for vertex in range(graph.n_vertices):
        angles = [math.degrees(angle) for angle, _ in half_edge_angles(graph, vertex)]
        found = np.diff(angles + [angles[0] + 360.0])
        np.testing.assert_allclose(sorted(found), gaps, atol=1e-9)


def test_cyclic_order_is_counterclockwise():
    graph = builtin('super_kagome')
    for vertex, order in enumerate(graph.cyclic_order):
        assert list(order) == [index for _, index in half_edge_angles(graph, vertex)]
