import numpy as np
import pytest

from sparsepoly import lemmas
from sparsepoly.errors import ParameterError


@pytest.mark.parametrize(
    "name,trials",
    [
        ("restriction", 30),
        ("detection", 5),
        ("subadditivity", 30),
        ("influence_sum", 30),
        ("high_count", 30),
        ("short_terms", 30),
        ("zeroing", 30),
        ("zero_density", 30),
        ("metric", 30),
        ("estimator", 10),
    ],
)
def test_suite_passes(name: str, trials: int):
    result = lemmas.run_suite(name, trials, seed=3)
    assert result.passed, result.detail
    assert result.checks > 0


def test_mobius_suite_small():
    result = lemmas.mobius_suite(5, np.random.default_rng(0), exhaustive_n=3, random_n=6)
    assert result.checks == 256 + 5
    assert result.failures == 0


def test_suites_are_reproducible():
    a = lemmas.run_suite("subadditivity", 10, seed=5).as_dict()
    b = lemmas.run_suite("subadditivity", 10, seed=5).as_dict()
    assert a == b


def test_run_suites_by_name():
    results = lemmas.run_suites("metric", 4, seed=0)
    assert [r.name for r in results] == ["metric"]
    assert results[0].checks == 12


def test_short_name_runs_the_same_suite():
    assert lemmas.run_suite("kl", 15, seed=2).as_dict() == lemmas.run_suite("zero_density", 15, seed=2).as_dict()
    assert "kl" not in lemmas.SUITES


def test_unknown_suite():
    with pytest.raises(ParameterError):
        lemmas.run_suite("nosuch")


def test_suite_result_keeps_first_failure():
    result = lemmas.SuiteResult("demo", allowed=1)
    result.check(True)
    result.check(False, "first")
    assert result.passed
    result.check(False, "second")
    assert not result.passed
    assert result.as_dict() == {
        "name": "demo",
        "checks": 3,
        "failures": 2,
        "allowed": 1,
        "passed": False,
        "detail": "first",
    }


def test_every_suite_is_registered():
    assert set(lemmas.SUITES) == {
        "mobius",
        "restriction",
        "detection",
        "subadditivity",
        "influence_sum",
        "high_count",
        "short_terms",
        "zeroing",
        "zero_density",
        "metric",
        "estimator",
    }
