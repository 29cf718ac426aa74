import pytest

from huapickrell.pseudojacobi import EnsembleParams
from huapickrell.verify import SUITES, TOLERANCES, CheckRecord, check_mass, run_suite


@pytest.mark.parametrize("suite", SUITES)
def test_default_grid_passes(suite):
    recs = run_suite(suite)
    assert recs
    bad = [r.as_dict() for r in recs if not r.passed]
    assert not bad


@pytest.mark.parametrize("suite", SUITES)
def test_perturbation_flips_every_check(suite):
    recs = run_suite(suite, perturb=0.01)
    assert recs and not any(r.passed for r in recs)


def test_record_dict():
    (r,) = check_mass(EnsembleParams(2.0, 3))
    d = r.as_dict()
    assert set(d) >= {"name", "params", "residual", "tolerance", "pass"}
    assert d["pass"] is True and d["tolerance"] == r.tolerance
    assert isinstance(r, CheckRecord)


def test_custom_pairs_and_threads():
    a = run_suite("zeros", pairs=[(2.0, 4), (1.5, 7)])
    b = run_suite("zeros", pairs=[(2.0, 4), (1.5, 7)], threads=3)
    assert [r.as_dict()["params"] for r in a] == [r.as_dict()["params"] for r in b]
    assert all(r.passed for r in a)


def test_errors_become_failed_records():
    # Ledoux needs Re s > 5/2; a user grid outside it yields failures, not exceptions
    recs = run_suite("ledoux", pairs=[(1.0, 2)])
    assert recs and not any(r.passed for r in recs)


def test_tolerances_positive():
    assert all(v > 0 for v in TOLERANCES.values())
