"""CSV tables and the phase diagram figure."""

import csv
import logging
from typing import Iterable, Sequence, TextIO

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

logger = logging.getLogger(__name__)

SVG_SIZE = (800 / 72, 500 / 72)
SVG_SALT = 'tiling-spectra'

PHASE_DIAGRAM_COLUMNS = ('alpha', 'i1_lo', 'i1_hi', 'i2_lo', 'i2_hi', 'flat1', 'flat2', 'gap')


def format_number(value) -> str:
    """Format with twelve significant digits; None prints as an empty field."""
    if value is None:
        return ''
    if isinstance(value, complex):
        value = value.real
    return '{:.12g}'.format(float(value))


def _writer(stream: TextIO):
    return csv.writer(stream, lineterminator='\n')


def write_rows(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write a header and rows; floats use ``format_number``, ints are kept."""
    writer = _writer(stream)
    writer.writerow(header)
    for row in rows:
        writer.writerow([value if isinstance(value, (int, str)) else format_number(value)
                         for value in row])


def write_band_structure(stream: TextIO, bands) -> None:
    write_rows(stream, ('theta1', 'theta2', 'level_index', 'eigenvalue'), bands.rows())


def write_flat_bands(stream: TextIO, report) -> None:
    write_rows(stream, ('energy', 'multiplicity', 'max_deviation'),
               ((flat.energy, flat.multiplicity, flat.max_deviation)
                for flat in report.energies))


def write_compact_state(stream: TextIO, state) -> None:
    write_rows(stream, ('cell_b1', 'cell_b2', 'vertex', 'amplitude_re', 'amplitude_im'),
               ((c1, c2, v, amplitude.real, amplitude.imag)
                for c1, c2, v, amplitude in state.amplitudes))


def write_torus_spectrum(stream: TextIO, values) -> None:
    write_rows(stream, ('index', 'eigenvalue'), enumerate(values))


def write_phase_diagram(stream: TextIO, rows) -> None:
    write_rows(stream, PHASE_DIAGRAM_COLUMNS,
               ((getattr(row, column) for column in PHASE_DIAGRAM_COLUMNS) for row in rows))


def write_phase_diagram_svg(path, rows, lattice: str, mu: float) -> None:
    """
    Draw the two bands as filled regions over alpha, with dashed flat bands.

    The output bytes depend only on the rows: the SVG id salt is fixed and
    no date is written.
    """
    alphas = [row.alpha / mu for row in rows]
    with matplotlib.rc_context({'svg.hashsalt': SVG_SALT, 'svg.fonttype': 'none'}):
        fig, ax = plt.subplots(figsize=SVG_SIZE)
        ax.fill_between(alphas, [r.i1_lo for r in rows], [r.i1_hi for r in rows],
                        color='tab:blue', alpha=0.5, linewidth=0, label='$I_1$')
        ax.fill_between(alphas, [r.i2_lo for r in rows], [r.i2_hi for r in rows],
                        color='tab:orange', alpha=0.5, linewidth=0, label='$I_2$')
        ax.plot(alphas, [r.flat1 for r in rows], 'k--', linewidth=1, label='flat bands')
        if rows and rows[0].flat2 is not None:
            ax.plot(alphas, [r.flat2 for r in rows], 'k--', linewidth=1)
        ax.set_xlim(0, 0.5)
        ax.set_ylim(0, 2)
        ax.set_xlabel(r'$\alpha / \mu$')
        ax.set_ylabel('spectrum')
        ax.set_title(lattice)
        ax.legend(loc='upper left')
        fig.savefig(path, format='svg', metadata={'Date': None})
        plt.close(fig)
    logger.info('Wrote phase diagram figure to %s', path)
