"""
Flat bands: numerical detection, algebraic conditions and compact eigenstates.

A level is flat when it is an eigenvalue of the Floquet Laplacian at every
quasi-momentum; for periodic graphs this already follows from coincidence on
a set of positive measure, so a handful of random points decides it.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .closed_form import (MonomericKagome, MonomericSuperKagome, kagome_charpoly_coefficients,
                          superkagome_charpoly)
from .floquet import adjacency_batch, eigenvalues, laplacian_spectra
from .periodic_graph import (PeriodicGraph, PreconditionError, WeightAssignment,
                             constant_vertex_weight, constant_weight_parametrization,
                             is_monomeric, require_constant_vertex_weight)
from .tilings import KAGOME, SUPER_KAGOME, builtin

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240205
DEFAULT_SAMPLES = 8
DEFAULT_TOLERANCE = 1e-9
NULL_SPACE_CUTOFF = 1e-10
AMPLITUDE_CUTOFF = 1e-9

STRUCTURED_POINTS = ((0.0, 0.0), (math.pi, math.pi), (2 * math.pi / 3, 4 * math.pi / 3))

REDUCED_CLASSES = ('g1', 'g2', 'g3', 'g7', 'g8', 'g9')

# (g1, g2, g3, g7, g8, g9) per unit mu at the two ends of the family curves
LIMIT_POINTS = {
    'X1': (0.0, 0.0, 0.0, 0.5, 0.5, 0.5),
    'X2': (0.5, 0.5, 0.5, 0.0, 0.0, 0.0),
}


@dataclass(frozen=True)
class FlatEnergy:
    energy: float
    multiplicity: int
    max_deviation: float


@dataclass(frozen=True)
class FlatBandReport:
    """Flat energies found at every sampled quasi-momentum, sorted by energy."""

    energies: Tuple[FlatEnergy, ...]

    @property
    def count(self) -> int:
        return len(self.energies)

    @property
    def values(self) -> Tuple[float, ...]:
        return tuple(flat.energy for flat in self.energies)

    @property
    def worst_deviation(self) -> float:
        return max((flat.max_deviation for flat in self.energies), default=0.0)


def sample_points(samples: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Return ``samples`` random angle pairs followed by the structured points."""
    rng = np.random.default_rng(seed)
    random_points = rng.uniform(0.0, 2 * math.pi, size=(samples, 2))
    return np.vstack([random_points, np.array(STRUCTURED_POINTS)])


def common_levels(spectra: np.ndarray, tol: float) -> FlatBandReport:
    """
    Find the values present in every row of ``spectra`` up to ``tol``.

    Candidates are the levels of the first row, with levels closer than
    ``tol`` grouped together.
    """
    reference = np.sort(spectra[0])
    groups: List[List[float]] = []
    for value in reference:
        if groups and value - groups[-1][-1] <= tol:
            groups[-1].append(value)
        else:
            groups.append([value])
    found = []
    for group in groups:
        energy = float(np.mean(group))
        distance = np.abs(spectra - energy)
        counts = (distance <= tol).sum(axis=1)
        if counts.min() >= 1:
            found.append(FlatEnergy(energy, int(counts.min()),
                                    float(distance.min(axis=1).max())))
    return FlatBandReport(tuple(found))


def detect_flat_bands(graph: PeriodicGraph, weights: WeightAssignment,
                      samples: int = DEFAULT_SAMPLES, tol: float = DEFAULT_TOLERANCE,
                      seed: int = DEFAULT_SEED) -> FlatBandReport:
    """
    Report the Laplacian levels that do not move with the quasi-momentum.

    Parameters
    ----------
    graph : PeriodicGraph
        Graph with constant vertex weight under ``weights``.
    weights : WeightAssignment
        Edge weights.
    samples : int
        Number of random quasi-momenta, at least 8. Three structured points
        are always added.
    tol : float
        Absolute tolerance on Laplacian energies.
    seed : int
        Seed of the random quasi-momenta.

    """
    if samples < DEFAULT_SAMPLES:
        raise PreconditionError(f'Flat band detection needs at least 8 samples, got {samples}.')
    mu = require_constant_vertex_weight(graph, weights)
    points = sample_points(samples, seed)
    logger.info('Sampling %d Floquet points on %s', len(points), graph.name)
    spectra = laplacian_spectra(graph, weights, points[:, 0], points[:, 1], mu)
    return common_levels(spectra, tol)


def kagome_condition_residuals(gammas: Sequence[float], lam: float = -1.0):
    """
    Evaluate the Kagome flat band conditions at adjacency eigenvalue ``lam``.

    The three theta-dependent coefficients of det(Pi - lam I) and its constant
    term must all vanish. The default lam = -1 is the normalization with
    g2 + g5 = 1.

    Returns
    -------
    tuple
        (numpy array of the three product residuals, scalar residual).

    """
    c1, c2, c3, c0 = kagome_charpoly_coefficients(gammas, lam)
    return np.array([c1, c2, c3]), c0


def superkagome_condition_residuals(gammas: Sequence[float], lam_tilde: float,
                                    signs: Sequence[int]) -> np.ndarray:
    """
    Evaluate the Super-Kagome one flat band conditions.

    Parameters
    ----------
    gammas : sequence of float
        (g1, g2, g3, g7, g8, g9), with g4 = g1, g5 = g2 and g6 = g3 implied.
    lam_tilde : float
        Candidate adjacency eigenvalue, mu (1 - lambda).
    signs : sequence of int
        (s7, s8, s9), each +1 or -1.

    Returns
    -------
    numpy.ndarray
        Four residuals: one per link condition and the theta-independent part
        of the characteristic polynomial.

    """
    g1, g2, g3, g7, g8, g9 = (float(g) for g in gammas)
    s7, s8, s9 = signs
    return np.array([
        -g1 * g3 / g2 + s9 * g9 - lam_tilde,
        -g1 * g2 / g3 + s8 * g8 - lam_tilde,
        -g2 * g3 / g1 + s7 * g7 - lam_tilde,
        superkagome_charpoly(gammas, lam_tilde),
    ])


def rotate_reduced(values: Sequence, times: int = 1) -> tuple:
    """Apply g1 -> g2 -> g3 -> g1 with g7 -> g9 -> g8 -> g7 to (g1, g2, g3, g7, g8, g9)."""
    values = tuple(values)
    for _ in range(times % 3):
        g1, g2, g3, g7, g8, g9 = values
        values = (g3, g1, g2, g8, g9, g7)
    return values


def rotate_signs(signs: Sequence[int], times: int = 1) -> tuple:
    """Permute (s7, s8, s9) along with the links."""
    signs = tuple(signs)
    for _ in range(times % 3):
        s7, s8, s9 = signs
        signs = (s8, s9, s7)
    return signs


def rotate_weights(weights: WeightAssignment, times: int = 1) -> WeightAssignment:
    """Rotate a Super-Kagome weight assignment about a triangle centre."""
    cycles = (('g1', 'g2', 'g3'), ('g4', 'g5', 'g6'), ('g7', 'g9', 'g8'))
    values = dict(weights.weights)
    for _ in range(times % 3):
        values = {**values, **{cycle[(k + 1) % 3]: values[cycle[k]]
                               for cycle in cycles for k in range(3)}}
    return WeightAssignment(values)


def expand_reduced(values: Sequence[float]) -> WeightAssignment:
    """Expand (g1, g2, g3, g7, g8, g9) into full Super-Kagome weights."""
    g1, g2, g3, g7, g8, g9 = values
    return WeightAssignment({'g1': g1, 'g2': g2, 'g3': g3, 'g4': g1, 'g5': g2, 'g6': g3,
                             'g7': g7, 'g8': g8, 'g9': g9})


def reduce_weights(weights: WeightAssignment) -> Tuple[float, ...]:
    return tuple(weights[label] for label in REDUCED_CLASSES)


FAMILY_CASES = ('MPP', 'PMM_a', 'PMM_b')

BASE_SIGNS = {
    'MPP': (1, 1, -1),
    'PMM_a': (-1, -1, 1),
    'PMM_b': (-1, -1, 1),
}


@dataclass(frozen=True)
class OneFlatBandFamily:
    """
    One curve of Super-Kagome weights with exactly one flat band.

    Attributes
    ----------
    case : str
        MPP, PMM_a or PMM_b.
    rotation : int
        Number of 2 pi / 3 rotations applied, 0, 1 or 2.
    mu : float
        Vertex weight.

    """

    case: str
    rotation: int = 0
    mu: float = 1.0

    def __post_init__(self):
        if self.case not in FAMILY_CASES:
            raise PreconditionError(f'Unknown family {self.case!r}.')
        if self.rotation not in (0, 1, 2):
            raise PreconditionError(f'Rotation must be 0, 1 or 2, got {self.rotation}.')
        if not self.mu > 0:
            raise PreconditionError(f'mu must be positive, got {self.mu}.')

    @property
    def interval(self) -> Tuple[float, float]:
        """Return the open parameter interval."""
        if self.case == 'MPP':
            return self.mu / 2, self.mu
        if self.case == 'PMM_a':
            return 0.0, self.mu / 2
        return 0.0, self.mu

    @property
    def signs(self) -> Tuple[int, int, int]:
        return rotate_signs(BASE_SIGNS[self.case], self.rotation)

    @property
    def component(self) -> str:
        """Return the connected component label, such as PMM/1; both PMM curves share one."""
        return f'{self.case[:3]}/{self.rotation}'

    def parameter(self, fraction: float) -> float:
        low, high = self.interval
        return low + (high - low) * fraction


def _family_base(case: str, mu: float, t: float) -> Tuple[Tuple[float, ...], float]:
    if case == 'MPP':
        beta = mu - 3 * t + math.sqrt(17 * t * t - 8 * t * mu)
        side = (mu - beta) / 2
        link = (mu + beta) / 2 - t
        return (side, t, side, link, link, beta), -2 * t + (mu + beta) / 2
    if case == 'PMM_a':
        beta = mu + 3 * t - math.sqrt(9 * t * t + 8 * t * mu)
        side = (mu - beta) / 2
        link = (mu + beta) / 2 - t
        return (side, t, side, link, link, beta), -(mu + beta) / 2
    beta = (mu - 3 * t + math.sqrt(mu * mu - 2 * t * mu + 5 * t * t)) / 2
    total = t + beta
    values = (t, t * beta / total, beta,
              mu - (2 * t * beta + beta * beta) / total,
              mu - (t * t + 2 * t * beta) / total,
              mu - t - beta)
    return values, mu - 2 * t - 2 * beta


def one_flat_band_family(family: OneFlatBandFamily, t: float) -> Tuple[WeightAssignment, float]:
    """
    Return the weights of ``family`` at ``t`` and the energy of its flat band.

    Raises
    ------
    PreconditionError
        If ``t`` is not strictly inside ``family.interval``.

    """
    low, high = family.interval
    if not low < t < high:
        raise PreconditionError(
            f'Parameter {t} is outside the open interval ({low:g}, {high:g}) of {family.case}.')
    values, lam_tilde = _family_base(family.case, family.mu, float(t))
    weights = expand_reduced(rotate_reduced(values, family.rotation))
    return weights, 1 - lam_tilde / family.mu


def all_families(mu: float = 1.0) -> List[OneFlatBandFamily]:
    return [OneFlatBandFamily(case, rotation, mu)
            for rotation in range(3) for case in FAMILY_CASES]


MIXED_SIGNS = ((1, 1, -1), (1, -1, 1), (-1, 1, 1), (-1, -1, 1), (-1, 1, -1), (1, -1, -1))


def on_one_flat_band_family(weights: WeightAssignment,
                            tol: float = DEFAULT_TOLERANCE) -> Optional[Tuple[tuple, float]]:
    """
    Return (signs, lam_tilde) if the Super-Kagome weights meet a mixed-sign condition.

    Only the six mixed sign patterns are tried; the all-equal patterns belong
    to the monomeric case.
    """
    graph = builtin(SUPER_KAGOME)
    mu = constant_vertex_weight(graph, weights)
    if mu is None:
        return None
    gammas = reduce_weights(weights)
    g1, g2, g3, g7, g8, g9 = gammas
    for signs in MIXED_SIGNS:
        s7, s8, s9 = signs
        candidates = (-g1 * g3 / g2 + s9 * g9, -g1 * g2 / g3 + s8 * g8, -g2 * g3 / g1 + s7 * g7)
        if max(candidates) - min(candidates) > tol * mu:
            continue
        lam_tilde = float(np.mean(candidates))
        if abs(superkagome_charpoly(gammas, lam_tilde)) <= tol * mu ** 6:
            return signs, lam_tilde
    return None


def expected_flat_count(lattice: str, weights: WeightAssignment,
                        tol: float = DEFAULT_TOLERANCE) -> int:
    """Predict the number of flat bands from the classification."""
    graph = builtin(lattice)
    if is_monomeric(graph, weights):
        return 1 if lattice == KAGOME else 2
    if lattice == SUPER_KAGOME and on_one_flat_band_family(weights, tol) is not None:
        return 1
    return 0


@dataclass
class ClassificationReport:
    """Outcome of sampling the flat band classification on one lattice."""

    lattice: str
    draws: int = 0
    counts: Dict[int, int] = field(default_factory=dict)
    mismatches: int = 0
    worst_deviation: float = 0.0

    @property
    def passed(self) -> bool:
        return self.mismatches == 0

    def record(self, expected: int, report: FlatBandReport,
               predicted: Sequence[float] = (), tol: float = DEFAULT_TOLERANCE) -> None:
        self.draws += 1
        self.counts[expected] = self.counts.get(expected, 0) + 1
        self.worst_deviation = max(self.worst_deviation, report.worst_deviation)
        matches = report.count == expected and all(
            abs(found - energy) <= tol for found, energy in zip(report.values, sorted(predicted)))
        if not matches:
            self.mismatches += 1
            logger.warning('Expected %d flat bands at %s, found %s',
                           expected, list(predicted), list(report.values))


def verify_flat_band_classification(lattice: str, trials: int, mu: float = 1.0,
                                    seed: int = DEFAULT_SEED,
                                    tol: float = DEFAULT_TOLERANCE) -> ClassificationReport:
    """
    Check the flat band count on random weights with constant vertex weight.

    Each trial draws one point of the constant vertex weight family and one
    monomeric point; for Super-Kagome it also draws one point of a one flat
    band family.
    """
    if lattice not in (KAGOME, SUPER_KAGOME):
        raise PreconditionError(
            f'The classification covers kagome and super_kagome, not {lattice}.')
    graph = builtin(lattice)
    rng = np.random.default_rng(seed)
    report = ClassificationReport(lattice)
    for weights in constant_weight_parametrization(graph, mu).sample(rng, trials):
        expected = expected_flat_count(lattice, weights, tol)
        report.record(expected, detect_flat_bands(graph, weights, tol=tol, seed=seed), tol=tol)
    model_type = MonomericKagome if lattice == KAGOME else MonomericSuperKagome
    for alpha in rng.uniform(0.01 * mu, 0.49 * mu, size=trials):
        model = model_type(float(alpha), mu)
        if lattice == KAGOME:
            predicted = (1.5,)
        else:
            predicted = (3 * model.alpha / mu, 2 - model.alpha / mu)
        found = detect_flat_bands(graph, model.weights(), tol=tol, seed=seed)
        report.record(len(predicted), found, predicted, tol)
    if lattice == SUPER_KAGOME:
        families = all_families(mu)
        for trial, fraction in enumerate(rng.uniform(0.05, 0.95, size=trials)):
            family = families[trial % len(families)]
            weights, energy = one_flat_band_family(family, family.parameter(fraction))
            found = detect_flat_bands(graph, weights, tol=tol, seed=seed)
            report.record(1, found, (energy,), tol)
    logger.info('Classification on %s: %d draws, %d mismatches',
                lattice, report.draws, report.mismatches)
    return report


def no_flat_band_sampler(graph: PeriodicGraph, trials: int, seed: int = DEFAULT_SEED,
                         tol: float = DEFAULT_TOLERANCE) -> bool:
    """
    Return True if no random periodic weights give the adjacency operator a flat band.

    Weights are drawn independently per class from (0.1, 1); the vertex
    weight is not constrained, so detection runs on Pi directly.
    """
    if graph.name in (KAGOME, SUPER_KAGOME):
        raise PreconditionError(f'{graph.name} has flat bands; sample one of the other tilings.')
    rng = np.random.default_rng(seed)
    points = sample_points(DEFAULT_SAMPLES, seed)
    labels = graph.weight_classes
    for trial in range(trials):
        weights = WeightAssignment.from_vector(labels, rng.uniform(0.1, 1.0, size=len(labels)))
        spectra = eigenvalues(adjacency_batch(graph, weights, points[:, 0], points[:, 1]))
        report = common_levels(spectra, tol)
        if report.count:
            logger.warning('Flat band on %s at trial %d: %s', graph.name, trial, report.values)
            return False
    return True


@dataclass(frozen=True)
class CompactState:
    """
    Finitely supported eigenvector of the infinite periodic Laplacian.

    Attributes
    ----------
    energy : float
        Eigenvalue.
    amplitudes : tuple of (int, int, int, complex)
        Nonzero entries as (cell_b1, cell_b2, vertex, amplitude), sorted;
        the largest amplitude is 1.
    residual : float
        Max-norm of (Laplacian - energy) applied to the state.

    """

    energy: float
    amplitudes: Tuple[Tuple[int, int, int, complex], ...]
    residual: float

    @property
    def support_size(self) -> int:
        return len(self.amplitudes)


def _patch_operator(graph: PeriodicGraph, weights: WeightAssignment, mu: float,
                    radius: int) -> Tuple[np.ndarray, Dict[Tuple[int, int, int], int]]:
    cells = [(c1, c2) for c1 in range(-radius, radius + 1) for c2 in range(-radius, radius + 1)]
    index = {(c1, c2, v): k for k, (c1, c2, v) in enumerate(
        (c1, c2, v) for c1, c2 in cells for v in range(graph.n_vertices))}
    operator = np.eye(len(index))
    for c1, c2 in cells:
        for edge in graph.edges:
            head = (c1 + edge.offset.b1, c2 + edge.offset.b2, edge.head)
            if head not in index:
                continue
            i, j = index[(c1, c2, edge.tail)], index[head]
            operator[i, j] -= weights[edge.weight_class] / mu
            operator[j, i] -= weights[edge.weight_class] / mu
    return operator, index


def _sparsest(basis: np.ndarray) -> np.ndarray:
    if basis.shape[1] == 1:
        return basis[:, 0]
    _, _, pivots = scipy.linalg.qr(basis.T, pivoting=True)
    rank = basis.shape[1]
    reduced = basis @ np.linalg.inv(basis[pivots[:rank], :])
    sizes = [(np.abs(col) > AMPLITUDE_CUTOFF * np.abs(col).max()).sum() for col in reduced.T]
    return reduced[:, int(np.argmin(sizes))]


def find_compact_eigenstate(graph: PeriodicGraph, weights: WeightAssignment, energy: float,
                            radius: int = 2) -> Optional[CompactState]:
    """
    Search for an eigenvector supported on finitely many cells.

    The operator is built on all cells within Chebyshev distance ``radius`` of
    the origin. Candidate supports are boxes of cells that keep one layer of
    reach away from the patch boundary, scanned in increasing size, so every
    row touching the support is complete. The first box whose restricted
    operator has a null vector wins.

    Parameters
    ----------
    graph : PeriodicGraph
        Graph with constant vertex weight.
    weights : WeightAssignment
        Edge weights.
    energy : float
        Candidate eigenvalue of the Laplacian.
    radius : int
        Patch radius in cells, at least 1.

    Returns
    -------
    CompactState or None
        None when no box admits a null vector.

    """
    if radius < 1:
        raise PreconditionError(f'The patch radius must be at least 1, got {radius}.')
    mu = require_constant_vertex_weight(graph, weights)
    inner = radius - max(graph.max_offset, 1)
    if inner < 0:
        raise PreconditionError(
            f'Radius {radius} leaves no interior cell for offsets up to {graph.max_offset}.')
    operator, index = _patch_operator(graph, weights, mu, radius)
    shifted = operator - energy * np.eye(len(index))
    side = 2 * inner + 1
    boxes = sorted(((s1, s2) for s1 in range(1, side + 1) for s2 in range(1, side + 1)),
                   key=lambda box: (box[0] * box[1], box))
    for s1, s2 in boxes:
        columns = [index[(-inner + d1, -inner + d2, v)]
                   for d1 in range(s1) for d2 in range(s2) for v in range(graph.n_vertices)]
        null = scipy.linalg.null_space(shifted[:, columns], rcond=NULL_SPACE_CUTOFF)
        if null.shape[1] == 0:
            continue
        vector = np.zeros(len(index))
        vector[columns] = _sparsest(null)
        vector /= vector[np.argmax(np.abs(vector))]
        vector[np.abs(vector) <= AMPLITUDE_CUTOFF] = 0.0
        residual = float(np.max(np.abs(shifted @ vector)))
        logger.info('Null vector on a %dx%d box at energy %.12g, residual %.3g',
                    s1, s2, energy, residual)
        amplitudes = tuple(sorted((c1, c2, v, complex(vector[k]))
                                  for (c1, c2, v), k in index.items() if vector[k] != 0.0))
        return CompactState(float(energy), amplitudes, residual)
    logger.info('No compact state at energy %.12g within radius %d', energy, radius)
    return None
