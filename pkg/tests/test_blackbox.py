from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from sparsepoly import blackbox
from sparsepoly.blackbox import Phase, QueryLedger
from sparsepoly.errors import DimensionError, IndexOutOfRange, ParameterError
from sparsepoly.gf2poly import SparsePoly, all_assignments, canonicalize, evaluate_many, truth_table


def test_poly_oracle_signs():
    p = canonicalize([(1, 2), (3,)], 3)
    f = blackbox.make_poly_oracle(p)
    X = all_assignments(3)
    assert f.query_many(X).tolist() == (1 - 2 * evaluate_many(p, X).astype(int)).tolist()
    assert f.query_count == 8
    assert f.ledger.total == 8


def test_table_oracle_matches_poly_oracle():
    p = canonicalize([(1,), (2, 4), ()], 4)
    X = all_assignments(4)
    by_table = blackbox.make_table_oracle(truth_table(p)).query_many(X)
    by_poly = blackbox.make_poly_oracle(p).query_many(X)
    assert np.array_equal(by_table, by_poly)


def test_query_rejects_wrong_width():
    f = blackbox.make_poly_oracle(SparsePoly.zero(3))
    with pytest.raises(DimensionError):
        f.query((0, 1))
    assert f.query_count == 0


def test_ledger_phases():
    f = blackbox.make_poly_oracle(SparsePoly.zero(2))
    with f.ledger.phase(Phase.VARIATION):
        f.query_many(np.zeros((5, 2), dtype=bool))
        with f.ledger.phase(Phase.SHIV):
            f.query((1, 1))
        f.query((0, 1))
    f.query((1, 0))
    assert f.ledger.as_dict() == {
        "variation": 6,
        "closeness": 0,
        "shiv": 1,
        "equivalence": 0,
        "other": 1,
        "total": 8,
    }


def test_zero_restricted_oracle_charges_once():
    p = canonicalize([(1, 2), (3,)], 3)
    f = blackbox.make_poly_oracle(p)
    g = blackbox.zero_restricted_oracle(f, [3])
    assert g.query((1, 1, 1)) == -1
    assert g.query((0, 0, 1)) == 1
    assert f.query_count == 2 and g.query_count == 2
    assert f.ledger is g.ledger
    assert f.ledger.total == 2

    with pytest.raises(IndexOutOfRange):
        blackbox.zero_restricted_oracle(f, [4])


def test_flip_noise_density_and_determinism():
    f = blackbox.make_poly_oracle(SparsePoly.zero(12))
    noisy = blackbox.flip_noise_oracle(f, Fraction(1, 4), seed=9)
    X = all_assignments(12)
    flipped = noisy.flipped(X)
    assert abs(flipped.mean() - 0.25) < 0.03
    assert np.array_equal(noisy.query_many(X) < 0, flipped)
    assert np.array_equal(blackbox.flip_noise_oracle(f, 0.25, seed=9).flipped(X), flipped)
    assert not np.array_equal(blackbox.flip_noise_oracle(f, 0.25, seed=10).flipped(X), flipped)
    assert f.ledger.total == 1 << 12


@pytest.mark.parametrize("fraction,expected", [(0, 0), (1, 16)])
def test_flip_noise_extremes(fraction, expected: int):
    noisy = blackbox.flip_noise_oracle(blackbox.make_poly_oracle(SparsePoly.zero(4)), fraction, seed=1)
    assert int(noisy.flipped(all_assignments(4)).sum()) == expected


def test_flip_noise_fraction_range():
    with pytest.raises(ValueError):
        blackbox.flip_noise_oracle(blackbox.make_poly_oracle(SparsePoly.zero(2)), 1.5, seed=0)


def test_read_oracle():
    samples = Path(__file__).parent.parent / "samples"
    f = blackbox.read_oracle(poly=samples / "canonical.poly")
    assert f.n == 64
    t = blackbox.read_oracle(table=samples / "parity3.table")
    assert t.query((1, 1, 1)) == -1
    with pytest.raises(ParameterError):
        blackbox.read_oracle()
    with pytest.raises(ParameterError):
        blackbox.read_oracle(samples / "canonical.poly", samples / "parity3.table")


def test_ledger_starts_empty():
    assert QueryLedger().as_dict()["total"] == 0
