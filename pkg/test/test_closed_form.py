import math

import numpy as np
import pytest

from tiling_spectra.closed_form import (MonomericKagome, MonomericSuperKagome, alpha_grid,
                                        dispersion, flat_slots, kagome_charpoly,
                                        kagome_dispersion, kagome_spectrum, monomeric,
                                        phase_diagram, spectrum, superkagome_attachment,
                                        superkagome_charpoly, superkagome_charpoly_factored,
                                        superkagome_dispersion, superkagome_spectrum)
from tiling_spectra.flatband import detect_flat_bands, expand_reduced
from tiling_spectra.floquet import adjacency_matrix, band_structure, eigenvalues, laplacian
from tiling_spectra.periodic_graph import PreconditionError, WeightAssignment
from tiling_spectra.tilings import builtin

DIRAC = (2 * math.pi / 3, 4 * math.pi / 3)


def _numeric_intervals(graph, weights, grid=48):
    return band_structure(graph, weights, grid).union_intervals()


@pytest.mark.parametrize('alpha', [0.0, 0.5, -0.1, 0.7])
def test_alpha_must_be_inside_the_open_interval(alpha):
    with pytest.raises(PreconditionError):
        MonomericKagome(alpha)
    with pytest.raises(PreconditionError):
        MonomericSuperKagome(alpha)


def test_monomeric_weights():
    kagome = MonomericKagome(0.1, 2.0)
    assert kagome.beta == pytest.approx(0.9)
    assert kagome.weights()['g2'] == 0.1
    assert kagome.weights()['g1'] == pytest.approx(0.9)
    super_kagome = MonomericSuperKagome(0.3)
    assert super_kagome.beta == pytest.approx(0.4)
    assert super_kagome.weights()['g7'] == pytest.approx(0.4)
    assert super_kagome.weights()['g6'] == 0.3


def test_monomeric_dispatch():
    assert isinstance(monomeric('kagome', 0.2), MonomericKagome)
    assert isinstance(monomeric('super_kagome', 0.2), MonomericSuperKagome)
    with pytest.raises(PreconditionError):
        monomeric('square', 0.2)


def test_kagome_dispersion_at_origin():
    np.testing.assert_allclose(kagome_dispersion(MonomericKagome(0.25), (0.0, 0.0)),
                               [0.0, 1.5, 1.5], atol=1e-12)


def test_kagome_dispersion_at_dirac_point():
    np.testing.assert_allclose(kagome_dispersion(MonomericKagome(0.125), DIRAC),
                               [0.375, 1.125, 1.5], atol=1e-12)


def test_kagome_spectrum_example():
    report = kagome_spectrum(MonomericKagome(0.125))
    np.testing.assert_allclose(report.bands, [(0.0, 0.375), (1.125, 1.5)], atol=1e-12)
    assert report.gap_width == pytest.approx(0.75)
    assert [(f.energy, f.attached_to) for f in report.flat_bands] == [(1.5, 'max(I2)')]


@pytest.mark.parametrize('alpha', [0.05, 0.125, 0.3, 0.45])
def test_kagome_gap_law(alpha):
    report = kagome_spectrum(MonomericKagome(alpha))
    (_, i1_hi), (i2_lo, _) = report.bands
    assert i2_lo - i1_hi == pytest.approx(report.gap_width, abs=1e-14)
    assert report.gap_width == pytest.approx(abs(6 * alpha - 1.5), abs=1e-14)


def test_kagome_gap_closes_only_at_a_quarter():
    rows = phase_diagram('kagome', 1.0, alpha_grid(1.0, 199))
    closed = [row.alpha for row in rows if row.gap <= 1e-12]
    assert closed == [pytest.approx(0.25)]


@pytest.mark.parametrize('alpha', [0.1, 0.25, 0.4])
def test_kagome_closed_form_matches_numerics(alpha):
    graph = builtin('kagome')
    model = MonomericKagome(alpha, 3.0)
    rng = np.random.default_rng(5)
    for theta in rng.uniform(0, 2 * math.pi, size=(50, 2)):
        np.testing.assert_allclose(kagome_dispersion(model, theta),
                                   eigenvalues(laplacian(graph, model.weights(), theta)),
                                   atol=1e-10)


@pytest.mark.parametrize('alpha', [0.05, 2 / 7, 1 / 3, 0.45])
def test_superkagome_closed_form_matches_numerics(alpha):
    graph = builtin('super_kagome')
    model = MonomericSuperKagome(alpha, 2.0)
    rng = np.random.default_rng(6)
    for theta in rng.uniform(0, 2 * math.pi, size=(50, 2)):
        np.testing.assert_allclose(superkagome_dispersion(model, theta),
                                   eigenvalues(laplacian(graph, model.weights(), theta)),
                                   atol=1e-10)


def test_superkagome_dispersion_at_origin():
    values = superkagome_dispersion(MonomericSuperKagome(1 / 3), (0.0, 0.0))
    for expected in (0.0, 1.0, 5 / 3):
        assert np.min(np.abs(values - expected)) <= 1e-12


def test_superkagome_dispersion_at_band_touching():
    values = superkagome_dispersion(MonomericSuperKagome(2 / 7), (0.0, 0.0))
    np.testing.assert_allclose(values, [0, 6 / 7, 6 / 7, 6 / 7, 12 / 7, 12 / 7], atol=1e-7)


def test_superkagome_spectrum_example():
    report = superkagome_spectrum(MonomericSuperKagome(1 / 3))
    np.testing.assert_allclose(report.bands, [(0.0, 2 / 3), (1.0, 5 / 3)], atol=1e-12)
    assert [f.energy for f in report.flat_bands] == pytest.approx([1.0, 5 / 3])
    assert report.flat_bands[0].attached_to == 'min(I2)'
    assert report.flat_bands[1].attached_to == 'max(I2)'


@pytest.mark.parametrize('alpha, attachment', [
    (0.1, 'max(I1)'), (2 / 7, 'touching'), (0.4, 'min(I2)'),
])
def test_superkagome_flat_band_attachment(alpha, attachment):
    model = MonomericSuperKagome(alpha)
    assert superkagome_attachment(model) == attachment
    report = superkagome_spectrum(model)
    (_, i1_hi), (i2_lo, _) = report.bands
    flat = report.flat_bands[0].energy
    if attachment == 'max(I1)':
        assert flat == pytest.approx(i1_hi, abs=1e-14)
    elif attachment == 'min(I2)':
        assert flat == pytest.approx(i2_lo, abs=1e-14)
    else:
        assert report.gap_width == pytest.approx(0.0, abs=1e-12)


def test_superkagome_small_alpha_example():
    report = superkagome_spectrum(MonomericSuperKagome(0.1))
    assert report.bands[0][1] == pytest.approx(0.3)
    assert report.flat_bands[0].energy == pytest.approx(0.3)


@pytest.mark.parametrize('alpha', [0.05, 0.2, 0.35, 0.49])
def test_superkagome_gap_and_endpoint_laws(alpha):
    report = superkagome_spectrum(MonomericSuperKagome(alpha))
    (i1_lo, i1_hi), (i2_lo, i2_hi) = report.bands
    assert i1_lo == 0.0
    assert i2_hi == pytest.approx(2 - alpha)
    assert i2_lo - i1_hi == pytest.approx(report.gap_width, abs=1e-14)
    assert report.gap_width == pytest.approx(abs(7 * alpha - 2), abs=1e-14)


@pytest.mark.parametrize('lattice, alpha', [
    ('kagome', 0.1), ('kagome', 0.4), ('super_kagome', 0.1), ('super_kagome', 0.4),
])
def test_closed_form_intervals_match_the_grid(lattice, alpha):
    model = monomeric(lattice, alpha)
    report = spectrum(model)
    numeric = _numeric_intervals(builtin(lattice), model.weights())
    np.testing.assert_allclose(numeric, report.bands, atol=1e-9)


def test_band_edges_are_attained_on_a_finer_grid():
    model = MonomericKagome(0.1)
    levels = band_structure(builtin('kagome'), model.weights(), 96).levels
    report = kagome_spectrum(model)
    assert levels[..., 0].max() == pytest.approx(report.bands[0][1], abs=1e-6)
    assert levels[..., 1].min() == pytest.approx(report.bands[1][0], abs=1e-6)


@pytest.mark.parametrize('lattice', ['kagome', 'super_kagome'])
def test_spectrum_is_scale_invariant(lattice):
    graph = builtin(lattice)
    base = monomeric(lattice, 0.15).weights()
    theta = (0.7, 2.9)
    np.testing.assert_allclose(eigenvalues(laplacian(graph, base, theta)),
                               eigenvalues(laplacian(graph, base.scaled(3.5), theta)),
                               atol=1e-12)


def test_dispersion_dispatch():
    model = MonomericSuperKagome(0.2)
    np.testing.assert_allclose(dispersion(model, (1.0, 2.0)),
                               superkagome_dispersion(model, (1.0, 2.0)))


def test_flat_slots():
    levels = [0.1, 0.5, 0.9, 1.7]
    assert flat_slots(levels, [0.9, 1.7]) == (2, 3)
    assert flat_slots(levels, [1.2]) == (None,)


def test_phase_diagram_rows():
    rows = phase_diagram('super_kagome', 1.0, alpha_grid(1.0, 199))
    assert len(rows) == 199
    assert rows[0].alpha == pytest.approx(0.5 / 200)
    assert rows[-1].alpha == pytest.approx(0.5 * 199 / 200)
    assert all(row.flat2 == pytest.approx(2 - row.alpha) for row in rows)
    kagome_rows = phase_diagram('kagome', 1.0, alpha_grid(1.0, 3))
    assert all(row.flat2 is None for row in kagome_rows)


def test_phase_diagram_rejects_alpha_outside_range():
    with pytest.raises(PreconditionError):
        phase_diagram('kagome', 1.0, [0.1, 0.5])


@pytest.mark.parametrize('seed', [1, 2, 3])
def test_kagome_charpoly_matches_determinant(seed):
    graph = builtin('kagome')
    rng = np.random.default_rng(seed)
    gammas = rng.uniform(0.1, 1.0, size=6)
    weights = WeightAssignment.from_vector(graph.weight_classes, gammas)
    lam, theta1, theta2 = rng.uniform(-2, 2), rng.uniform(0, 6), rng.uniform(0, 6)
    matrix = adjacency_matrix(graph, weights, (theta1, theta2))
    expected = np.linalg.det(lam * np.eye(3) - matrix).real
    assert kagome_charpoly(gammas, lam, (theta1, theta2)) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize('seed', [1, 2, 3])
def test_superkagome_charpoly_matches_determinant(seed):
    graph = builtin('super_kagome')
    rng = np.random.default_rng(seed)
    reduced = rng.uniform(0.1, 1.0, size=6)
    lam, theta1, theta2 = rng.uniform(-2, 2), rng.uniform(0, 6), rng.uniform(0, 6)
    matrix = adjacency_matrix(graph, expand_reduced(reduced), (theta1, theta2))
    expected = np.linalg.det(lam * np.eye(6) - matrix).real
    value = superkagome_charpoly(reduced, lam, (theta1, theta2))
    assert value == pytest.approx(expected, abs=1e-9 * max(1.0, abs(expected)))


def test_superkagome_factored_polynomial():
    alpha, beta = 0.3, 0.4
    theta = (1.1, 2.3)
    for lam in (-0.9, -0.2, 0.4, 1.3):
        expanded = superkagome_charpoly((alpha,) * 3 + (beta,) * 3, lam, theta)
        factored = superkagome_charpoly_factored(alpha, beta, lam, theta)
        assert factored == pytest.approx(expanded, abs=1e-12)
    assert superkagome_charpoly_factored(alpha, beta, -(alpha + beta), theta) == \
        pytest.approx(0.0, abs=1e-14)
    assert superkagome_charpoly_factored(alpha, beta, beta - alpha, theta) == \
        pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize('lattice', ['kagome', 'super_kagome'])
def test_numeric_sweep_matches_closed_forms(lattice):
    graph = builtin(lattice)
    closed = []
    for alpha in alpha_grid(1.0, 199):
        model = monomeric(lattice, alpha)
        report = spectrum(model)
        numeric = _numeric_intervals(graph, model.weights())
        if len(numeric) == 1:
            assert report.gap_width <= 1e-8
            np.testing.assert_allclose(numeric, [(0.0, report.bands[1][1])], atol=1e-8)
            closed.append(alpha)
        else:
            np.testing.assert_allclose(numeric, report.bands, atol=1e-8)
            assert numeric[1][0] - numeric[0][1] == pytest.approx(report.gap_width, abs=1e-8)
    assert closed == ([pytest.approx(0.25)] if lattice == 'kagome' else [])


def test_super_kagome_sweep_detects_both_flat_bands():
    graph = builtin('super_kagome')
    for alpha in alpha_grid(1.0, 199):
        report = detect_flat_bands(graph, MonomericSuperKagome(alpha).weights())
        assert report.values == pytest.approx((3 * alpha, 2 - alpha), abs=1e-9)
        assert report.worst_deviation <= 1e-9


def test_super_kagome_gap_closes_on_grid():
    alpha = alpha_grid(1.0, 6)[3]
    assert alpha == pytest.approx(2 / 7)
    numeric = _numeric_intervals(builtin('super_kagome'), MonomericSuperKagome(alpha).weights())
    assert len(numeric) == 1
    assert superkagome_spectrum(MonomericSuperKagome(alpha)).gap_width <= 1e-10
