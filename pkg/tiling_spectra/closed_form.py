"""
Exact band structure of the monomeric Kagome and Super-Kagome lattices.

Both lattices are parametrized by (alpha, mu) with alpha in (0, mu/2); the
second weight beta is derived from the constant vertex weight. Dispersions are
returned in ascending order; ``flat_slots`` reports where the flat values sit.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .floquet import f_kagome, f_superkagome
from .periodic_graph import PreconditionError, WeightAssignment
from .tilings import KAGOME, SUPER_KAGOME

logger = logging.getLogger(__name__)

RADICAND_SLACK = 1e-12
TOUCH_TOLERANCE = 1e-12


def _check_alpha(alpha: float, mu: float) -> None:
    if not mu > 0:
        raise PreconditionError(f'mu must be positive, got {mu}.')
    if not 0 < alpha < mu / 2:
        raise PreconditionError(f'alpha must lie in (0, mu/2) = (0, {mu / 2:g}), got {alpha}.')


@dataclass(frozen=True)
class MonomericKagome:
    """
    Breathing Kagome weights: alpha on one triangle orientation, beta on the other.

    Attributes
    ----------
    alpha : float
        Weight of the edges g2, g4 and g6.
    mu : float
        Vertex weight, 2 alpha + 2 beta.

    """

    alpha: float
    mu: float = 1.0

    def __post_init__(self):
        _check_alpha(self.alpha, self.mu)

    @property
    def beta(self) -> float:
        return (self.mu - 2 * self.alpha) / 2

    def weights(self) -> WeightAssignment:
        alpha, beta = self.alpha, self.beta
        return WeightAssignment({'g1': beta, 'g2': alpha, 'g3': beta,
                                 'g4': alpha, 'g5': beta, 'g6': alpha})


@dataclass(frozen=True)
class MonomericSuperKagome:
    """
    Super-Kagome weights: alpha on every triangle edge, beta on the links.

    Attributes
    ----------
    alpha : float
        Weight of the triangle edges g1 to g6.
    mu : float
        Vertex weight, 2 alpha + beta.

    """

    alpha: float
    mu: float = 1.0

    def __post_init__(self):
        _check_alpha(self.alpha, self.mu)

    @property
    def beta(self) -> float:
        return self.mu - 2 * self.alpha

    def weights(self) -> WeightAssignment:
        values = {f'g{i}': self.alpha for i in range(1, 7)}
        values.update({f'g{i}': self.beta for i in range(7, 10)})
        return WeightAssignment(values)


def monomeric(lattice: str, alpha: float, mu: float = 1.0):
    """Build the monomeric model of ``lattice``."""
    if lattice == KAGOME:
        return MonomericKagome(alpha, mu)
    if lattice == SUPER_KAGOME:
        return MonomericSuperKagome(alpha, mu)
    raise PreconditionError(f'No monomeric closed form for {lattice!r}.')


@dataclass(frozen=True)
class FlatBand:
    energy: float
    attached_to: str


@dataclass(frozen=True)
class SpectrumReport:
    """
    Band intervals, flat bands and the gap between the two bands.

    Attributes
    ----------
    bands : tuple of (float, float)
        I1 and I2, in increasing order; they may touch but never overlap.
    flat_bands : tuple of FlatBand
        Flat energies with the band endpoint they sit on.
    gap_width : float
        Distance between I1 and I2.

    """

    bands: Tuple[Tuple[float, float], ...]
    flat_bands: Tuple[FlatBand, ...]
    gap_width: float


def _radical(value: float) -> float:
    assert value >= -RADICAND_SLACK, f'negative radicand {value}'
    return math.sqrt(max(value, 0.0))


def kagome_dispersion(model: MonomericKagome, theta) -> np.ndarray:
    """
    Return the three Laplacian eigenvalues at ``theta``, ascending.

    The two dispersive levels are 3/4 -+ sqrt(1 + 8 (1 + (F - 3) x)) / 4 with
    F = f_kagome(theta) and x = 2 alpha / mu - 4 alpha^2 / mu^2; the third
    level is 3/2 everywhere.
    """
    ratio = model.alpha / model.mu
    shape = 2 * ratio - 4 * ratio ** 2
    spread = _radical(1 + 8 * (1 + (float(f_kagome(theta)) - 3) * shape)) / 4
    return np.sort(np.array([0.75 - spread, 0.75 + spread, 1.5]))


def kagome_spectrum(model: MonomericKagome) -> SpectrumReport:
    half_gap = abs(3 * model.alpha / model.mu - 0.75)
    return SpectrumReport(
        bands=((0.0, 0.75 - half_gap), (0.75 + half_gap, 1.5)),
        flat_bands=(FlatBand(1.5, 'max(I2)'),),
        gap_width=abs(6 * model.alpha / model.mu - 1.5))


def _superkagome_f(theta) -> float:
    # the characteristic polynomial sees cos(theta1 - theta2) in this package's offsets
    theta1, theta2 = theta
    return float(f_superkagome((theta1, -theta2)))


def superkagome_dispersion(model: MonomericSuperKagome, theta) -> np.ndarray:
    """
    Return the six Laplacian eigenvalues at ``theta``, ascending.

    With a = alpha, b = beta and r = sqrt(3 + 2F), the adjacency eigenvalues
    are -a - b, b - a and (a +- sqrt(9a^2 + 4b^2 +- 4ab r)) / 2; each maps to
    1 - value / mu.
    """
    a, b, mu = model.alpha, model.beta, model.mu
    root = _radical(3 + 2 * _superkagome_f(theta))
    outer = _radical(9 * a * a + 4 * b * b + 4 * a * b * root)
    inner = _radical(9 * a * a + 4 * b * b - 4 * a * b * root)
    values = [
        1 - (a + outer) / (2 * mu),
        1 - (a + inner) / (2 * mu),
        3 * a / mu,
        1 - (a - inner) / (2 * mu),
        1 - (a - outer) / (2 * mu),
        2 - a / mu,
    ]
    return np.sort(np.array(values))


def superkagome_attachment(model: MonomericSuperKagome) -> str:
    """Name the band endpoint that carries the flat band 3 alpha / mu."""
    excess = 7 * model.alpha - 2 * model.mu
    if abs(excess) <= TOUCH_TOLERANCE * model.mu:
        return 'touching'
    return 'max(I1)' if excess < 0 else 'min(I2)'


def superkagome_spectrum(model: MonomericSuperKagome) -> SpectrumReport:
    a, mu = model.alpha, model.mu
    centre = 1 - a / (2 * mu)
    half_gap = abs(3 * a - 2 * model.beta) / (2 * mu)
    return SpectrumReport(
        bands=((0.0, centre - half_gap), (centre + half_gap, 2 - a / mu)),
        flat_bands=(FlatBand(3 * a / mu, superkagome_attachment(model)),
                    FlatBand(2 - a / mu, 'max(I2)')),
        gap_width=abs(7 * a - 2 * mu) / mu)


def spectrum(model) -> SpectrumReport:
    if isinstance(model, MonomericKagome):
        return kagome_spectrum(model)
    return superkagome_spectrum(model)


def dispersion(model, theta) -> np.ndarray:
    if isinstance(model, MonomericKagome):
        return kagome_dispersion(model, theta)
    return superkagome_dispersion(model, theta)


def flat_slots(levels: Sequence[float], energies: Sequence[float],
               tol: float = 1e-9) -> Tuple[Optional[int], ...]:
    """Return, for every energy, the sorted slot of ``levels`` holding it (None if absent)."""
    levels = np.asarray(levels)
    slots = []
    for energy in energies:
        distance = np.abs(levels - energy)
        slot = int(np.argmin(distance))
        slots.append(slot if distance[slot] <= tol else None)
    return tuple(slots)


@dataclass(frozen=True)
class PhaseDiagramRow:
    alpha: float
    i1_lo: float
    i1_hi: float
    i2_lo: float
    i2_hi: float
    flat1: float
    flat2: Optional[float]
    gap: float


def phase_diagram(lattice: str, mu: float, alphas: Sequence[float]):
    """
    Tabulate the spectrum of the monomeric lattice along ``alphas``.

    Parameters
    ----------
    lattice : str
        kagome or super_kagome.
    mu : float
        Vertex weight.
    alphas : sequence of float
        Values strictly inside (0, mu/2).

    Returns
    -------
    list of PhaseDiagramRow
        One row per alpha, in input order.

    """
    rows = []
    for alpha in alphas:
        report = spectrum(monomeric(lattice, float(alpha), mu))
        (i1_lo, i1_hi), (i2_lo, i2_hi) = report.bands
        flats = [flat.energy for flat in report.flat_bands]
        rows.append(PhaseDiagramRow(float(alpha), i1_lo, i1_hi, i2_lo, i2_hi, flats[0],
                                    flats[1] if len(flats) > 1 else None, report.gap_width))
    logger.info('Tabulated %d phase diagram rows for %s', len(rows), lattice)
    return rows


def alpha_grid(mu: float, points: int) -> np.ndarray:
    """Return (mu / 2) j / (points + 1) for j = 1..points."""
    return (mu / 2) * np.arange(1, points + 1) / (points + 1)


def kagome_charpoly_coefficients(gammas: Sequence[float], lam: float):
    """
    Return the coefficients of det(Pi - lam I) for the Kagome lattice.

    The determinant equals c1 (w + 1/w) + c2 (z + 1/z) + c3 (w/z + z/w) + c0
    with w = exp(i theta1) and z = exp(i theta2).

    Returns
    -------
    tuple of float
        (c1, c2, c3, c0).

    """
    g1, g2, g3, g4, g5, g6 = (float(g) for g in gammas)
    c1 = lam * g3 * g6 + g2 * g3 * g4 + g1 * g5 * g6
    c2 = lam * g2 * g5 + g4 * g5 * g6 + g1 * g2 * g3
    c3 = lam * g1 * g4 + g3 * g4 * g5 + g1 * g2 * g6
    c0 = (-lam ** 3 + lam * sum(g * g for g in (g1, g2, g3, g4, g5, g6))
          + 2 * (g2 * g4 * g6 + g1 * g3 * g5))
    return c1, c2, c3, c0


def kagome_charpoly(gammas: Sequence[float], lam: float, theta) -> float:
    """Evaluate det(lam I - Pi(theta)) from the expansion."""
    theta1, theta2 = theta
    c1, c2, c3, c0 = kagome_charpoly_coefficients(gammas, lam)
    return -(2 * math.cos(theta1) * c1 + 2 * math.cos(theta2) * c2
             + 2 * math.cos(theta1 - theta2) * c3 + c0)


def superkagome_charpoly(gammas: Sequence[float], lam: float, theta=None) -> float:
    """
    Evaluate det(lam I - Pi(theta)) for Super-Kagome weights with g4 = g1, g5 = g2, g6 = g3.

    Parameters
    ----------
    gammas : sequence of float
        (g1, g2, g3, g7, g8, g9).
    lam : float
        Spectral parameter.
    theta : (float, float), optional
        Quasi-momentum; without it only the theta-independent part is returned.

    """
    g1, g2, g3, g7, g8, g9 = (float(g) for g in gammas)
    s1, s2, s3, s7, s8, s9 = (g * g for g in (g1, g2, g3, g7, g8, g9))
    triple = g1 * g2 * g3
    value = (lam ** 6
             - lam ** 4 * (2 * s1 + 2 * s2 + 2 * s3 + s7 + s8 + s9)
             - 4 * lam ** 3 * triple
             + lam ** 2 * (s1 * s1 + s2 * s2 + s3 * s3
                           + 2 * s1 * s2 + 2 * s2 * s3 + 2 * s3 * s1
                           + 2 * s1 * s7 + 2 * s2 * s9 + 2 * s3 * s8
                           + s7 * s8 + s8 * s9 + s9 * s7)
             + 4 * lam * triple * (s1 + s2 + s3)
             - s1 * s1 * s7 - s2 * s2 * s9 - s3 * s3 * s8
             - s7 * s8 * s9 + 4 * s1 * s2 * s3)
    if theta is None:
        return value
    theta1, theta2 = theta
    value -= 2 * math.cos(theta1) * (lam ** 2 * s2 * g7 * g8 + 2 * lam * triple * g7 * g8
                                     + s1 * s3 * g7 * g8 - s2 * g7 * g8 * s9)
    value -= 2 * math.cos(theta2) * (lam ** 2 * s3 * g7 * g9 + 2 * lam * triple * g7 * g9
                                     + s1 * s2 * g7 * g9 - s3 * g7 * s8 * g9)
    value -= 2 * math.cos(theta1 - theta2) * (lam ** 2 * s1 * g8 * g9
                                              + 2 * lam * triple * g8 * g9
                                              + s2 * s3 * g8 * g9 - s1 * s7 * g8 * g9)
    return value


def superkagome_charpoly_factored(alpha: float, beta: float, lam: float, theta) -> float:
    """Return ((alpha + lam)^2 - beta^2) times the quartic factor, for monomeric weights."""
    a, b = alpha, beta
    f = _superkagome_f(theta)
    quartic = (lam ** 4 - 2 * a * lam ** 3 - (3 * a * a + 2 * b * b) * lam ** 2
               + (4 * a ** 3 + 2 * a * b * b) * lam
               + 4 * a ** 4 + a * a * b * b + b ** 4 - 2 * a * a * b * b * f)
    return ((a + lam) ** 2 - b * b) * quartic
