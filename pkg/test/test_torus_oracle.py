import numpy as np
import pytest

from tiling_spectra.closed_form import MonomericKagome, MonomericSuperKagome
from tiling_spectra.periodic_graph import (PreconditionError, WeightAssignment,
                                           constant_weight_parametrization)
from tiling_spectra.tilings import builtin
from tiling_spectra.torus_oracle import (build_torus, compare_with_floquet, flat_multiplicity,
                                         floquet_union_spectrum, torus_spectrum)


@pytest.mark.parametrize('name, cells, dim', [('kagome', 4, 48), ('super_kagome', 3, 54)])
def test_torus_dimension(name, cells, dim):
    graph = builtin(name)
    operator = build_torus(graph, WeightAssignment.uniform(graph), cells)
    assert operator.dim == dim
    np.testing.assert_allclose(operator.adjacency, operator.adjacency.T)


def test_torus_rows_sum_to_vertex_weight():
    graph = builtin('super_kagome')
    weights = MonomericSuperKagome(0.2, 1.5).weights()
    operator = build_torus(graph, weights, 3)
    assert operator.mu == pytest.approx(1.5)
    np.testing.assert_allclose(operator.adjacency.sum(axis=1), 1.5)


def test_small_torus_is_rejected():
    graph = builtin('kagome')
    with pytest.raises(PreconditionError):
        build_torus(graph, WeightAssignment.uniform(graph), 2)


@pytest.mark.parametrize('name, cells', [
    ('kagome', 3), ('kagome', 5), ('super_kagome', 3), ('super_kagome', 4), ('488', 4),
])
def test_torus_matches_floquet_union(name, cells):
    graph = builtin(name)
    rng = np.random.default_rng(21)
    weights = constant_weight_parametrization(graph, 1.0).sample(rng, 1)[0]
    assert compare_with_floquet(graph, weights, cells) <= 1e-9


def test_floquet_union_size():
    graph = builtin('kagome')
    values = floquet_union_spectrum(graph, WeightAssignment.uniform(graph), 4)
    assert values.shape == (48,)
    assert np.all(np.diff(values) >= 0)


@pytest.mark.parametrize('cells, count', [(4, 17), (6, 37)])
@pytest.mark.parametrize('alpha', [0.125, 0.3])
def test_kagome_flat_multiplicity(alpha, cells, count):
    # one extra level where the upper band touches the flat band at the origin
    operator = build_torus(builtin('kagome'), MonomericKagome(alpha).weights(), cells)
    assert flat_multiplicity(operator, 1.5) == count


@pytest.mark.parametrize('alpha', [0.15, 2 / 7, 0.4])
def test_super_kagome_flat_multiplicity(alpha):
    cells = 3
    operator = build_torus(builtin('super_kagome'), MonomericSuperKagome(alpha).weights(), cells)
    spectrum = torus_spectrum(operator)
    for energy in (3 * alpha, 2 - alpha):
        assert cells ** 2 <= flat_multiplicity(operator, energy, spectrum=spectrum) <= \
            cells ** 2 + 2


def test_non_monomeric_kagome_multiplicity_grows_with_the_torus():
    # g3 = g6 cancels the 0-1 coupling at theta1 = pi, leaving the level 1 on that whole line
    weights = WeightAssignment({'g1': 0.3, 'g2': 0.2, 'g3': 0.25, 'g4': 0.2, 'g5': 0.3,
                                'g6': 0.25})
    counts = []
    for cells in (4, 8):
        operator = build_torus(builtin('kagome'), weights, cells)
        counts.append(flat_multiplicity(operator, 1.0))
        assert cells <= counts[-1] < cells ** 2
    assert counts[1] > 6
