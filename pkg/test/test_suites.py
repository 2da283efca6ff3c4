import pytest

from tiling_spectra.periodic_graph import PreconditionError
from tiling_spectra.suites import SUITES, run_suites


def test_small_suites_pass():
    results = run_suites(['classification', 'families', 'tilings'], trials=2, seed=4)
    assert [result.name for result in results] == ['classification', 'families', 'tilings']
    for result in results:
        assert result.passed, result.detail
        assert result.worst <= 1e-9


def test_families_detail_counts_every_curve():
    (result,) = run_suites(['families'], trials=2, seed=4)
    assert result.detail.startswith('6 components: ')
    assert 'MPP/0 0/2 failed' in result.detail
    assert 'PMM/1 0/4 failed' in result.detail


def test_torus_suite_passes():
    (result,) = run_suites(['torus'], sizes=[3, 4])
    assert result.passed, result.detail
    assert result.worst <= 1e-9


def test_suite_results_are_reproducible():
    first = run_suites(['families'], trials=1, seed=9)
    assert first == run_suites(['families'], trials=1, seed=9)


def test_unknown_suite():
    with pytest.raises(PreconditionError, match='Unknown suite'):
        run_suites(['everything'])
    assert 'torus' in SUITES
