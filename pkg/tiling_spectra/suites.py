"""Verification suites run by ``tiling-spectra verify``."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from .closed_form import MonomericKagome, MonomericSuperKagome
from .flatband import (DEFAULT_SEED, DEFAULT_TOLERANCE, all_families, detect_flat_bands,
                       no_flat_band_sampler, one_flat_band_family, reduce_weights,
                       superkagome_condition_residuals, verify_flat_band_classification)
from .periodic_graph import (PreconditionError, constant_vertex_weight,
                             constant_weight_parametrization, is_monomeric)
from .tilings import KAGOME, SUPER_KAGOME, builtin, other_tilings
from .torus_oracle import build_torus, compare_with_floquet, flat_multiplicity, torus_spectrum

logger = logging.getLogger(__name__)

SUITES = ('classification', 'families', 'torus', 'tilings')

DEFAULT_TRIALS = {'classification': 50, 'families': 25, 'tilings': 100}
DEFAULT_TORUS_SIZES = (3, 4, 5, 6)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float
    detail: str


def run_classification(trials: int, seed: int, tol: float) -> SuiteResult:
    reports = [verify_flat_band_classification(lattice, trials, seed=seed, tol=tol)
               for lattice in (KAGOME, SUPER_KAGOME)]
    detail = '; '.join(f'{r.lattice}: {r.draws} draws, {r.mismatches} mismatches'
                       for r in reports)
    return SuiteResult('classification', all(r.passed for r in reports),
                       max(r.worst_deviation for r in reports), detail)


def run_families(trials: int, seed: int, tol: float, mu: float = 1.0) -> SuiteResult:
    """Sample every one flat band curve; group the outcome by connected component."""
    graph = builtin(SUPER_KAGOME)
    rng = np.random.default_rng(seed)
    failures: Dict[str, int] = {}
    sampled: Dict[str, int] = {}
    worst = 0.0
    for family in all_families(mu):
        failures.setdefault(family.component, 0)
        sampled[family.component] = sampled.get(family.component, 0) + trials
        for fraction in rng.uniform(0.02, 0.98, size=trials):
            weights, energy = one_flat_band_family(family, family.parameter(fraction))
            residuals = superkagome_condition_residuals(
                reduce_weights(weights), mu * (1 - energy), family.signs)
            report = detect_flat_bands(graph, weights, tol=tol, seed=seed)
            vertex_weight = constant_vertex_weight(graph, weights)
            worst = max(worst, report.worst_deviation, float(np.max(np.abs(residuals))))
            good = (vertex_weight is not None and abs(vertex_weight - mu) <= 1e-12 * mu
                    and not is_monomeric(graph, weights)
                    and report.count == 1 and abs(report.values[0] - energy) <= tol
                    and np.max(np.abs(residuals)) <= 1e-10)
            if not good:
                failures[family.component] += 1
                logger.warning('%s/%d at t=%.12g: %d flat bands %s, expected %.12g',
                               family.case, family.rotation, family.parameter(fraction),
                               report.count, report.values, energy)
    detail = ', '.join(f'{name} {failures[name]}/{count} failed'
                       for name, count in sampled.items())
    return SuiteResult('families', not any(failures.values()), worst,
                       f'{len(sampled)} components: {detail}')


def run_torus(sizes: Sequence[int], seed: int, tol: float, mu: float = 1.0) -> SuiteResult:
    """Compare torus and Floquet spectra, then count flat levels on the torus."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    problems: List[str] = []
    for lattice in (KAGOME, SUPER_KAGOME):
        graph = builtin(lattice)
        random_weights = constant_weight_parametrization(graph, mu).sample(rng, 1)[0]
        alpha = float(rng.uniform(0.05 * mu, 0.45 * mu))
        if lattice == KAGOME:
            flat_weights, flats = MonomericKagome(alpha, mu).weights(), (1.5,)
        else:
            flat_weights = MonomericSuperKagome(alpha, mu).weights()
            flats = (3 * alpha / mu, 2 - alpha / mu)
        for cells in sizes:
            deviation = max(compare_with_floquet(graph, random_weights, cells),
                            compare_with_floquet(graph, flat_weights, cells))
            worst = max(worst, deviation)
            if deviation > tol:
                problems.append(f'{lattice} M={cells} deviation {deviation:.3g}')
            operator = build_torus(graph, flat_weights, cells)
            spectrum = torus_spectrum(operator)
            for energy in flats:
                count = flat_multiplicity(operator, energy, tol, spectrum)
                if not cells ** 2 <= count <= cells ** 2 + 2:
                    problems.append(f'{lattice} M={cells} E={energy:.12g} multiplicity {count}')
    return SuiteResult('torus', not problems, worst,
                       '; '.join(problems) or f'M in {list(sizes)} on {KAGOME}, {SUPER_KAGOME}')


def run_tilings(trials: int, seed: int, tol: float) -> SuiteResult:
    flat = [name for name in other_tilings()
            if not no_flat_band_sampler(builtin(name), trials, seed, tol)]
    detail = f'flat band found on {", ".join(flat)}' if flat else \
        f'{len(other_tilings())} tilings x {trials} draws without a flat band'
    return SuiteResult('tilings', not flat, 0.0, detail)


def run_suites(names: Sequence[str] = SUITES, trials: int = None, sizes: Sequence[int] = None,
               seed: int = DEFAULT_SEED, tol: float = DEFAULT_TOLERANCE) -> List[SuiteResult]:
    """
    Run the named suites in order.

    Parameters
    ----------
    names : sequence of str
        Any of classification, families, torus and tilings.
    trials : int, optional
        Draws per suite; each suite has its own default.
    sizes : sequence of int, optional
        Torus sizes M, default 3 to 6.
    seed : int
        Seed shared by all suites.
    tol : float
        Detection tolerance.

    """
    results = []
    for name in names:
        if name not in SUITES:
            raise PreconditionError(f'Unknown suite {name!r}; choose from {", ".join(SUITES)}.')
        logger.info('Running suite %s', name)
        count = trials if trials is not None else DEFAULT_TRIALS.get(name)
        if name == 'classification':
            results.append(run_classification(count, seed, tol))
        elif name == 'families':
            results.append(run_families(count, seed, tol))
        elif name == 'torus':
            results.append(run_torus(sizes or DEFAULT_TORUS_SIZES, seed, tol))
        else:
            results.append(run_tilings(count, seed, tol))
    return results
