from dataclasses import replace
from typing import Sequence

import numpy as np
import pytest

from sparsepoly import tester
from sparsepoly.blackbox import make_poly_oracle, make_table_oracle
from sparsepoly.errors import CapExceeded, DimensionError, ParameterError
from sparsepoly.gf2poly import SparsePoly, canonicalize, random_truth_table
from sparsepoly.partition import derive_params, random_partition
from sparsepoly.tester import Outcome, Reason

CANONICAL = [(1, 2), (3, 4, 5)]


def isolating_seed(n: int, r: int, variables: Sequence[int]) -> int:
    """First seed whose partition puts each of `variables` in its own subset."""
    for seed in range(1000):
        split = random_partition(n, r, np.random.default_rng(seed))
        if len({split.assignment[i - 1] for i in variables}) == len(variables):
            return seed
    raise AssertionError("no isolating seed")


def colliding_seed(n: int, r: int, variables: Sequence[int]) -> int:
    """First seed whose partition puts all of `variables` in one subset."""
    for seed in range(1000):
        split = random_partition(n, r, np.random.default_rng(seed))
        if len({split.assignment[i - 1] for i in variables}) == 1:
            return seed
    raise AssertionError("no colliding seed")


def test_shiv_sets_the_relevant_variable():
    f = make_poly_oracle(canonicalize([(3,)], 6))
    for seed in range(20):
        for b in (0, 1):
            x = tester.shiv(f, (5, 2, 3), 0.5, 0.03, b, 0.01, np.random.default_rng(seed))
            assert x is not None
            assert int(x[1]) == b


def test_shiv_contract_on_padded_dictator():
    f = make_poly_oracle(canonicalize([(1,)], 8))
    rng = np.random.default_rng(12)
    fails = wrong = 0
    for _ in range(500):
        b = int(rng.integers(2))
        x = tester.shiv(f, (1, 2, 3, 4, 5), 0.125, 0.03, b, 0.1, rng)
        if x is None:
            fails += 1
        elif int(x[0]) != b:
            wrong += 1
    assert fails <= 50
    assert wrong <= 0.1 * (500 - fails)


def test_shiv_fails_on_two_relevant_variables():
    f = make_poly_oracle(canonicalize([(1,), (2,)], 2))
    results = [tester.shiv(f, (1, 2), 0.5, 0.03, 1, 0.01, np.random.default_rng(seed)) for seed in range(50)]
    assert any(x is None for x in results)


def test_shiv_rejects_bad_arguments():
    f = make_poly_oracle(SparsePoly.zero(3))
    with pytest.raises(ValueError):
        tester.shiv(f, (), 0.5, 0.03, 1, 0.01, np.random.default_rng(0))
    with pytest.raises(ParameterError):
        tester.shiv(f, (1,), 0.0, 0.03, 1, 0.01, np.random.default_rng(0))
    with pytest.raises(ParameterError):
        tester.shiv(f, (1,), 0.5, 0.03, 1, 1.0, np.random.default_rng(0))


@pytest.mark.parametrize("z,expected", [((1, 1), -1), ((1, 0), 1), ((0, 1), 1), ((0, 0), 1)])
def test_simmq_answers_the_junta(z, expected: int):
    f = make_poly_oracle(canonicalize([(2, 5)], 6))
    subsets = {1: (1, 2, 3), 2: (4, 5, 6)}
    assert tester.simmq(f, (1, 2), subsets, 0.25, 0.03, z, 0.001, np.random.default_rng(4)) == expected


def test_simmq_fail_skips_the_final_query():
    f = make_poly_oracle(SparsePoly.zero(2))
    answer = tester.simmq(f, (1,), {1: (1, 2)}, 0.5, 0.03, (1,), 0.01, np.random.default_rng(0))
    assert answer is None
    assert f.query_count == 4 * tester.shiv_iterations(0.5, 0.01)


def test_simmq_checks_dimension():
    f = make_poly_oracle(SparsePoly.zero(2))
    with pytest.raises(DimensionError):
        tester.simmq(f, (1,), {1: (1,)}, 0.5, 0.03, (1, 0), 0.01, np.random.default_rng(0))


def test_accepts_canonical_polynomial():
    n, params = 12, derive_params(2, 0.1, "desk", {"r": 16, "bigM": 4000})
    seed = isolating_seed(n, params.r, range(1, 6))
    f = make_poly_oracle(canonicalize(CANONICAL, n))
    verdict = tester.test_sparse_poly(f, 2, 0.1, params, np.random.default_rng(seed))
    assert verdict.outcome is Outcome.ACCEPT
    assert verdict.reason is None
    assert len(verdict.classification.high) == 5
    assert verdict.hypothesis.sparsity == 2
    assert sorted(len(m) for m in verdict.hypothesis.monomials) == [2, 3]
    counts = verdict.ledger.counts
    assert counts["variation"] == 2 * params.r * params.M
    assert counts["closeness"] == 2 * params.m
    assert counts["shiv"] > 0 and counts["equivalence"] > 0
    assert verdict.queries == f.query_count


def test_exact_backend_classifies_the_same_way():
    n, params = 10, derive_params(2, 0.1, "desk", {"r": 16})
    seed = isolating_seed(n, params.r, range(1, 6))
    f = make_poly_oracle(canonicalize(CANONICAL, n))
    verdict = tester.test_sparse_poly(f, 2, 0.1, params, np.random.default_rng(seed), exact_backend=True)
    assert verdict.accepted
    assert verdict.ledger.counts["variation"] == 1 << n
    assert all(e.exact is not None for e in verdict.estimates)


def test_rejects_dense_parity():
    n, params = 10, derive_params(2, 0.1, "desk", {"r": 4, "bigM": 500})
    parity = canonicalize([(i,) for i in range(1, n + 1)], n)
    for seed in range(3):
        verdict = tester.test_sparse_poly(make_poly_oracle(parity), 2, 0.1, params, np.random.default_rng(seed))
        assert verdict.outcome is Outcome.REJECT
        assert verdict.reason in (Reason.NOT_SPARSE, Reason.SHIV_FAILED)
        assert verdict.hypothesis is None


def test_wide_parity_gets_a_verdict():
    # every occupied subset is high; more of them than the learner can enumerate
    n, params = 40, derive_params(3, 0.1, "desk", {"bigM": 200})
    parity = canonicalize([(i,) for i in range(1, n + 1)], n)
    seed = next(
        seed
        for seed in range(100)
        if 20 < len(set(random_partition(n, params.r, np.random.default_rng(seed)).assignment)) <= params.high_bound
    )
    f = make_poly_oracle(parity)
    verdict = tester.test_sparse_poly(f, 3, 0.1, params, np.random.default_rng(seed))
    assert verdict.outcome is Outcome.REJECT
    assert verdict.reason is Reason.LEARNER_TOO_LARGE
    assert 20 < len(verdict.classification.high) <= params.high_bound
    assert verdict.to_dict()["reason"] == "learner-too-large"
    assert verdict.ledger.counts["shiv"] == 0


def test_rejects_on_closeness_check():
    # threshold above every variation: all subsets are zeroed
    params = derive_params(1, 0.1, "desk", {"r": 2, "bigM": 2000, "alpha": 0.9})
    f = make_poly_oracle(canonicalize([(1, 2)], 2))
    verdict = tester.test_sparse_poly(f, 1, 0.1, params, np.random.default_rng(0))
    assert verdict.reason is Reason.CLOSENESS
    assert verdict.classification.high == ()
    assert verdict.ledger.counts["shiv"] == 0


def test_rejects_too_many_high_subsets():
    # tau = 4 makes the bound s log2(8 s^3 / tau) = 1
    params = derive_params(1, 0.1, "desk", {"r": 2, "tau": 4.0})
    assert params.high_bound == 1
    seed = isolating_seed(2, 2, (1, 2))
    f = make_poly_oracle(canonicalize([(1,), (2,)], 2))
    verdict = tester.test_sparse_poly(f, 1, 0.1, params, np.random.default_rng(seed), exact_backend=True)
    assert verdict.reason is Reason.TOO_MANY_HIGH
    assert verdict.ledger.counts["shiv"] == 0


def test_collision_makes_shiv_fail():
    params = derive_params(1, 0.1, "desk", {"r": 2})
    seed = colliding_seed(2, 2, (1, 2))
    f = make_poly_oracle(canonicalize([(1,), (2,)], 2))
    verdict = tester.test_sparse_poly(f, 1, 0.1, params, np.random.default_rng(seed), exact_backend=True)
    assert verdict.outcome is Outcome.REJECT
    assert len(verdict.classification.high) == 1


def test_empty_grid_rejects():
    params = replace(derive_params(1, 0.1, "desk"), alpha_grid=())
    f = make_poly_oracle(SparsePoly.zero(4))
    verdict = tester.test_sparse_poly(f, 1, 0.1, params, np.random.default_rng(0))
    assert verdict.reason is Reason.EMPTY_GRID
    assert verdict.queries == 0


def test_theory_constants_exceed_work_cap():
    params = derive_params(2, 0.6, "theory")
    assert params.r > 10**12
    f = make_poly_oracle(canonicalize(CANONICAL, 8))
    with pytest.raises(CapExceeded, match="work cap"):
        tester.test_sparse_poly(f, 2, 0.6, params, np.random.default_rng(0))
    assert f.query_count == 0


def test_work_cap_from_environment(monkeypatch):
    monkeypatch.setenv("SPARSEPOLY_WORK_CAP", "1000")
    params = derive_params(1, 0.5, "desk", {"r": 4, "bigM": 200})
    f = make_poly_oracle(SparsePoly.zero(6))
    with pytest.raises(CapExceeded):
        tester.test_sparse_poly(f, 1, 0.5, params, np.random.default_rng(0))
    assert tester.test_sparse_poly(f, 1, 0.5, params, np.random.default_rng(0), exact_backend=True).accepted


def test_params_must_match():
    params = derive_params(2, 0.1, "desk")
    f = make_poly_oracle(SparsePoly.zero(4))
    with pytest.raises(ParameterError):
        tester.test_sparse_poly(f, 3, 0.1, params, np.random.default_rng(0))


def test_same_seed_same_verdict():
    params = derive_params(2, 0.25, "desk", {"r": 8, "bigM": 300})
    t = random_truth_table(8, np.random.default_rng(1))
    a = tester.test_sparse_poly(make_table_oracle(t), 2, 0.25, params, np.random.default_rng(7)).to_dict()
    b = tester.test_sparse_poly(make_table_oracle(t), 2, 0.25, params, np.random.default_rng(7)).to_dict()
    assert a == b


def test_verdict_report():
    params = derive_params(1, 0.5, "desk", {"r": 4, "bigM": 50})
    verdict = tester.test_sparse_poly(make_poly_oracle(SparsePoly.zero(6)), 1, 0.5, params, np.random.default_rng(2))
    report = verdict.to_dict()
    assert report["outcome"] == "accept"
    assert report["hypothesis"] == "n=0\n"
    assert report["high_count"] == 0
    assert report["queries"]["total"] == sum(v for k, v in report["queries"].items() if k != "total")
    assert report["learner"]["status"] == "hypothesis"
    assert len(report["estimates"]) == len(report["subset_sizes"]) == 4


def test_accepting_verdict_needs_hypothesis():
    params = derive_params(1, 0.5, "desk")
    f = make_poly_oracle(SparsePoly.zero(2))
    with pytest.raises(ValueError):
        tester.Verdict(Outcome.ACCEPT, None, f.ledger, params, 2)
    with pytest.raises(ValueError):
        tester.Verdict(Outcome.ACCEPT, Reason.CLOSENESS, f.ledger, params, 2, hypothesis=SparsePoly.zero(0))
