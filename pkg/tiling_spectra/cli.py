"""Command line front end, ``tiling-spectra <command> [options]``."""

import argparse
import contextlib
import json
import logging
import math
import sys

from .closed_form import alpha_grid, monomeric, phase_diagram, spectrum
from .export import (format_number, write_band_structure, write_compact_state,
                     write_flat_bands, write_phase_diagram, write_phase_diagram_svg, write_rows,
                     write_torus_spectrum)
from .flatband import (DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE, OneFlatBandFamily,
                       detect_flat_bands, find_compact_eigenstate, one_flat_band_family)
from .floquet import band_structure, merge_intervals
from .periodic_graph import (GraphFormatError, NoSolutionError, PreconditionError,
                             UnsupportedGraphError, WeightError, load_graph, load_weights,
                             require_constant_vertex_weight)
from .suites import SUITES, run_suites
from .tilings import KAGOME, SUPER_KAGOME, builtin, names
from .torus_oracle import build_torus, torus_spectrum

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CROSSCHECK = 3
EXIT_EXPECTATION = 4
EXIT_VERIFY = 5
EXIT_COMPACT = 6

COMMANDS = ('spectrum', 'flat-bands', 'phase-diagram', 'verify', 'compact-state')
FAMILIES = {'mpp': 'MPP', 'pmm_a': 'PMM_a', 'pmm_b': 'PMM_b'}
MONOMERIC_LATTICES = (KAGOME, SUPER_KAGOME)

PARAMETERS = [
    ('command', None),
    ('lattice', None),
    ('graph_file', None),
    ('weights_file', None),
    ('alpha', None),
    ('mu', 1.0),
    ('family', None),
    ('rotation', 0),
    ('t', None),
    ('grid', 48),
    ('tol', DEFAULT_TOLERANCE),
    ('seed', DEFAULT_SEED),
    ('samples', DEFAULT_SAMPLES),
    ('format', 'csv'),
    ('svg', None),
    ('output', None),
    ('expect', None),
    ('suite', None),
    ('trials', None),
    ('M', None),
    ('energy', None),
    ('radius', 2),
    ('expect_found', False),
    ('points', 199),
    ('crosscheck', True),
    ('bands', None),
    ('torus', None),
]


class ConfigError(ValueError):
    """Invalid command line configuration."""


class RunConfig:
    """
    Settings of one command run.

    Every name in ``PARAMETERS`` becomes an attribute, taken from the keyword
    arguments or the listed default.

    Parameters
    ----------
    command : str
        One of spectrum, flat-bands, phase-diagram, verify, compact-state.
    lattice : str
        Built-in tiling name.
    graph_file : str
        Graph file, instead of ``lattice``.
    weights_file : str
        Weight file (class label -> weight).
    alpha : float
        Monomeric parameter of kagome or super_kagome.
    mu : float
        Vertex weight.
    family : str
        One flat band family, mpp, pmm_a or pmm_b.
    rotation : int
        Rotation of the family, 0, 1 or 2.
    t : float
        Family parameter.
    grid : int
        Floquet grid size K.
    tol : float
        Flat band and cross-check tolerance.
    seed : int
        Seed for all random sampling.
    format : str
        csv or json.
    bands : str
        Path for the K x K band structure table of ``spectrum``.
    torus : str
        Path for the M x M torus spectrum of ``spectrum``, with ``M``.

    Methods
    -------
    validate()
        Raise ConfigError for inconsistent settings.

    """

    def __init__(self, **values):
        for param, default in PARAMETERS:
            value = values.get(param)
            setattr(self, param, default if value is None else value)

    @classmethod
    def from_namespace(cls, namespace: argparse.Namespace) -> 'RunConfig':
        return cls(**vars(namespace))

    def _weight_sources(self) -> int:
        return sum(source is not None for source in (self.alpha, self.weights_file, self.family))

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f'Unknown command {self.command!r}.')
        if self.grid < 3:
            raise ConfigError(f'--grid must be at least 3, got {self.grid}.')
        if not self.tol > 0:
            raise ConfigError(f'--tol must be positive, got {self.tol}.')
        if not self.mu > 0:
            raise ConfigError(f'--mu must be positive, got {self.mu}.')
        if self.M is not None and self.M < 3:
            raise ConfigError(f'--M must be at least 3, got {self.M}.')
        if self.command in ('spectrum', 'flat-bands', 'compact-state'):
            self._validate_weights()
        if self.command == 'spectrum' and self.torus is not None and self.M is None:
            raise ConfigError('--torus needs the torus size --M.')
        if self.command == 'compact-state' and self.energy is None:
            raise ConfigError('compact-state needs --energy.')
        if self.command == 'phase-diagram':
            if self.lattice not in MONOMERIC_LATTICES:
                raise ConfigError('phase-diagram needs --lattice kagome or super_kagome.')
            if self.points < 1:
                raise ConfigError(f'--points must be at least 1, got {self.points}.')
        if self.command == 'verify':
            if self.suite is not None and self.suite not in SUITES:
                raise ConfigError(
                    f'Unknown suite {self.suite!r}; choose from {", ".join(SUITES)}.')
            if self.trials is not None and self.trials < 1:
                raise ConfigError(f'--trials must be positive, got {self.trials}.')

    def _validate_weights(self) -> None:
        if (self.lattice is None) == (self.graph_file is None):
            raise ConfigError('Give exactly one of --lattice and --graph-file.')
        if self._weight_sources() != 1:
            raise ConfigError(
                'Give exactly one weight source: --alpha, --weights-file or --family.')
        if self.alpha is not None and self.lattice not in MONOMERIC_LATTICES:
            raise ConfigError('--alpha needs --lattice kagome or super_kagome.')
        if self.family is not None:
            if self.lattice != SUPER_KAGOME:
                raise ConfigError('--family needs --lattice super_kagome.')
            if self.t is None:
                raise ConfigError('--family needs the parameter --t.')


def resolve(config: RunConfig):
    """
    Load the graph and weights named by ``config``.

    Returns
    -------
    tuple
        (graph, weights, monomeric model or None, predicted flat energy or None).

    """
    graph = builtin(config.lattice) if config.lattice else load_graph(config.graph_file)
    if config.alpha is not None:
        model = monomeric(config.lattice, config.alpha, config.mu)
        return graph, model.weights(), model, None
    if config.family is not None:
        family = OneFlatBandFamily(FAMILIES[config.family], config.rotation, config.mu)
        weights, energy = one_flat_band_family(family, config.t)
        return graph, weights, None, energy
    return graph, load_weights(config.weights_file), None, None


@contextlib.contextmanager
def output_stream(config: RunConfig):
    if config.output is None:
        yield sys.stdout
    else:
        with open(config.output, 'w', encoding='utf-8', newline='') as handle:
            yield handle


def _number(value):
    """Round to the printed precision so JSON and CSV agree."""
    if value is None or math.isinf(value):
        return None
    return float(format_number(value))


def _dump_json(stream, record) -> None:
    json.dump(record, stream, indent=2)
    stream.write('\n')


def _write_table(path, writer, table) -> None:
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        writer(handle, table)
    logger.info('Wrote %s', path)


def _interval_deviation(expected, numeric) -> float:
    if len(expected) != len(numeric):
        return math.inf
    return max(max(abs(a[0] - b[0]), abs(a[1] - b[1])) for a, b in zip(expected, numeric))


def cmd_spectrum(config: RunConfig) -> int:
    """Print band intervals, flat bands and gaps; cross-check closed forms numerically."""
    graph, weights, model, _ = resolve(config)
    require_constant_vertex_weight(graph, weights)
    bands = numeric = None
    if model is None or config.crosscheck or config.bands:
        bands = band_structure(graph, weights, config.grid)
        numeric = bands.union_intervals(config.tol)
    deviation = None
    if model is not None:
        report = spectrum(model)
        intervals = list(report.bands)
        flats = [(flat.energy, flat.attached_to) for flat in report.flat_bands]
        gaps = [report.gap_width]
        if config.crosscheck:
            deviation = _interval_deviation(merge_intervals(report.bands, config.tol), numeric)
    else:
        intervals = numeric
        found = detect_flat_bands(graph, weights, config.samples, config.tol, config.seed)
        flats = [(flat.energy, '') for flat in found.energies]
        gaps = [upper[0] - lower[1] for lower, upper in zip(intervals, intervals[1:])]
    with output_stream(config) as stream:
        if config.format == 'json':
            _dump_json(stream, {
                'graph': graph.name,
                'bands': [[_number(lo), _number(hi)] for lo, hi in intervals],
                'flat_bands': [{'energy': _number(e), 'attached_to': a} for e, a in flats],
                'gaps': [_number(gap) for gap in gaps],
                'crosscheck_deviation': None if deviation is None else _number(deviation),
            })
        else:
            rows = [(f'I{k + 1}', lo, hi, '') for k, (lo, hi) in enumerate(intervals)]
            rows += [('flat', energy, energy, attached) for energy, attached in flats]
            rows += [('gap', gap, '', '') for gap in gaps]
            if deviation is not None:
                rows.append(('crosscheck', '' if math.isinf(deviation) else deviation, '', ''))
            write_rows(stream, ('quantity', 'lower', 'upper', 'note'), rows)
    if config.bands:
        _write_table(config.bands, write_band_structure, bands)
    if config.torus:
        operator = build_torus(graph, weights, config.M)
        _write_table(config.torus, write_torus_spectrum, torus_spectrum(operator))
    if deviation is not None and deviation > config.tol:
        logger.error('Closed form and %dx%d grid disagree by %s',
                     config.grid, config.grid, deviation)
        return EXIT_CROSSCHECK
    return EXIT_OK


def cmd_flat_bands(config: RunConfig) -> int:
    graph, weights, _, predicted = resolve(config)
    report = detect_flat_bands(graph, weights, config.samples, config.tol, config.seed)
    if predicted is not None:
        logger.info('Family predicts a flat band at %.12g', predicted)
    with output_stream(config) as stream:
        if config.format == 'json':
            _dump_json(stream, [{'energy': _number(f.energy), 'multiplicity': f.multiplicity,
                                 'max_deviation': _number(f.max_deviation)}
                                for f in report.energies])
        else:
            write_flat_bands(stream, report)
    if config.expect is not None and report.count != config.expect:
        logger.error('Expected %d flat bands, found %d', config.expect, report.count)
        return EXIT_EXPECTATION
    return EXIT_OK


def cmd_phase_diagram(config: RunConfig) -> int:
    rows = phase_diagram(config.lattice, config.mu, alpha_grid(config.mu, config.points))
    with output_stream(config) as stream:
        if config.format == 'json':
            _dump_json(stream, [{key: _number(value) for key, value in vars(row).items()}
                                for row in rows])
        else:
            write_phase_diagram(stream, rows)
    if config.svg:
        write_phase_diagram_svg(config.svg, rows, config.lattice, config.mu)
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    suites = [config.suite] if config.suite else list(SUITES)
    sizes = [config.M] if config.M else None
    results = run_suites(suites, config.trials, sizes, config.seed, config.tol)
    with output_stream(config) as stream:
        if config.format == 'json':
            _dump_json(stream, [{'suite': r.name, 'passed': r.passed,
                                 'worst': _number(r.worst), 'detail': r.detail}
                                for r in results])
        else:
            write_rows(stream, ('suite', 'status', 'worst', 'detail'),
                       ((r.name, 'pass' if r.passed else 'FAIL', r.worst, r.detail)
                        for r in results))
    if not all(result.passed for result in results):
        return EXIT_VERIFY
    return EXIT_OK


def cmd_compact_state(config: RunConfig) -> int:
    graph, weights, _, _ = resolve(config)
    state = find_compact_eigenstate(graph, weights, config.energy, config.radius)
    with output_stream(config) as stream:
        if state is None:
            stream.write('none found\n')
        elif config.format == 'json':
            _dump_json(stream, {
                'energy': _number(state.energy),
                'support': state.support_size,
                'residual': _number(state.residual),
                'amplitudes': [[c1, c2, v, _number(a.real), _number(a.imag)]
                               for c1, c2, v, a in state.amplitudes],
            })
        else:
            stream.write(f'# support {state.support_size}\n')
            stream.write(f'# residual {format_number(state.residual)}\n')
            write_compact_state(stream, state)
    if state is None and config.expect_found:
        return EXIT_COMPACT
    return EXIT_OK


HANDLERS = {
    'spectrum': cmd_spectrum,
    'flat-bands': cmd_flat_bands,
    'phase-diagram': cmd_phase_diagram,
    'verify': cmd_verify,
    'compact-state': cmd_compact_state,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--lattice', choices=names() + ('33336',))
    common.add_argument('--graph-file', dest='graph_file')
    common.add_argument('--weights-file', '--weights', dest='weights_file')
    common.add_argument('--alpha', type=float)
    common.add_argument('--mu', type=float)
    common.add_argument('--family', choices=sorted(FAMILIES))
    common.add_argument('--rotation', type=int, choices=(0, 1, 2))
    common.add_argument('--t', type=float)
    common.add_argument('--grid', type=int, help='Floquet grid size K (default 48)')
    common.add_argument('--tol', type=float)
    common.add_argument('--seed', type=int)
    common.add_argument('--samples', type=int, help='random Floquet points for detection')
    common.add_argument('--format', choices=('csv', 'json'))
    common.add_argument('--svg')
    common.add_argument('--output')
    common.add_argument('--expect', type=int)
    common.add_argument('--suite', choices=SUITES)
    common.add_argument('--trials', type=int)
    common.add_argument('--M', dest='M', type=int)
    common.add_argument('--energy', type=float)
    common.add_argument('--radius', type=int)
    common.add_argument('--expect-found', dest='expect_found', action='store_true')
    common.add_argument('--points', type=int)
    common.add_argument('--no-crosscheck', dest='crosscheck', action='store_false', default=None)
    common.add_argument('--bands', help='write the K x K band structure CSV to this path')
    common.add_argument('--torus', help='write the M x M torus spectrum CSV to this path')
    common.add_argument('-v', '--verbose', action='store_true')
    common.add_argument('-q', '--quiet', action='store_true')
    parser = argparse.ArgumentParser(
        prog='tiling-spectra',
        description='Floquet spectra and flat bands of weighted Archimedean tilings.')
    commands = parser.add_subparsers(dest='command', required=True)
    for command in COMMANDS:
        commands.add_parser(command, parents=[common])
    return parser


def main(args=None) -> int:
    namespace = build_parser().parse_args(args)
    level = logging.INFO
    if namespace.verbose:
        level = logging.DEBUG
    elif namespace.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')
    config = RunConfig.from_namespace(namespace)
    try:
        config.validate()
        return HANDLERS[config.command](config)
    except (ConfigError, PreconditionError, WeightError, GraphFormatError,
            UnsupportedGraphError, NoSolutionError, OSError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return EXIT_CONFIG


if __name__ == '__main__':
    sys.exit(main())
