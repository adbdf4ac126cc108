import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsepoly.dyadic import Dyadic
from sparsepoly.errors import CapExceeded, DimensionError, IndexOutOfRange
from sparsepoly.gf2poly import (
    SparsePoly,
    TruthTable,
    all_assignments,
    canonicalize,
    distance,
    distance_to_sparse_class,
    evaluate,
    evaluate_many,
    mobius_interpolate,
    random_assignments,
    random_sparse,
    relevant_variables,
    restrict,
    truth_table,
    zero_fraction,
)


@st.composite
def polys(draw, max_n: int = 7, max_terms: int = 6):
    n = draw(st.integers(1, max_n))
    monomial = st.sets(st.integers(1, n), max_size=n).map(lambda m: tuple(sorted(m)))
    return canonicalize(draw(st.lists(monomial, max_size=max_terms)), n)


@st.composite
def tables(draw, max_n: int = 6):
    n = draw(st.integers(0, max_n))
    return TruthTable(n, draw(st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n)))


@given(polys())
def test_interpolation_inverts_truth_table(p: SparsePoly):
    assert mobius_interpolate(truth_table(p)) == p


@given(tables())
def test_truth_table_inverts_interpolation(t: TruthTable):
    assert truth_table(mobius_interpolate(t)) == t


@given(polys(), st.data())
def test_evaluate_matches_truth_table(p: SparsePoly, data):
    index = data.draw(st.integers(0, (1 << p.n) - 1))
    x = [(index >> i) & 1 for i in range(p.n)]
    assert evaluate(p, x) == truth_table(p)[index]


@given(polys(), st.data())
def test_restrict_overwrites_bits(p: SparsePoly, data):
    fixing = data.draw(st.dictionaries(st.integers(1, p.n), st.integers(0, 1)))
    X = all_assignments(p.n)
    overwritten = X.copy()
    for i, b in fixing.items():
        overwritten[:, i - 1] = bool(b)
    assert np.array_equal(evaluate_many(restrict(p, fixing), X), evaluate_many(p, overwritten))


@settings(max_examples=50)
@given(polys(max_n=5), polys(max_n=5))
def test_distance_is_symmetric(p: SparsePoly, q: SparsePoly):
    q = SparsePoly(p.n, frozenset(m for m in q.monomials if not m or m[-1] <= p.n))
    assert distance(p, q) == distance(q, p)
    assert (distance(p, q) == 0) == (p == q)


def test_canonicalize_cancels_pairs():
    p = canonicalize([(2, 1), (1, 2), (1, 2), (), ()], 3)
    assert p.terms == [(1, 2)]
    assert p.sparsity == 1 and p.degree == 2
    assert str(SparsePoly.zero(4)) == "0"


@pytest.mark.parametrize(
    "build",
    [
        lambda: canonicalize([(0,)], 3),
        lambda: canonicalize([(4,)], 3),
        lambda: SparsePoly(2, frozenset({(1, 3)})),
        lambda: restrict(canonicalize([(1,)], 2), {3: 0}),
    ],
)
def test_index_out_of_range(build):
    with pytest.raises(IndexOutOfRange):
        build()


def test_dimension_errors():
    p = canonicalize([(1,)], 3)
    with pytest.raises(DimensionError):
        evaluate(p, (1, 0))
    with pytest.raises(DimensionError):
        evaluate_many(p, np.zeros((4, 2), dtype=bool))
    with pytest.raises(DimensionError):
        TruthTable(2, [0, 1, 1])
    with pytest.raises(DimensionError):
        TruthTable(1, [0, 2])
    with pytest.raises(DimensionError):
        distance(p, canonicalize([(1,)], 2))


def test_assignment_bit_order():
    X = all_assignments(3)
    assert X.shape == (8, 3)
    assert X[6].tolist() == [False, True, True]
    assert str(truth_table(canonicalize([(1,)], 2))) == "0101"


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        truth_table(SparsePoly.zero(6), cap=5)
    with pytest.raises(CapExceeded):
        all_assignments(21)


def test_random_assignments_shape_and_balance():
    X = random_assignments(np.random.default_rng(3), 4000, 70)
    assert X.shape == (4000, 70) and X.dtype == bool
    assert abs(X.mean() - 0.5) < 0.01
    assert random_assignments(np.random.default_rng(3), 5, 0).shape == (5, 0)


@pytest.mark.parametrize("n,s,degree", [(6, 4, 2), (64, 3, 3), (40, 10, 5)])
def test_random_sparse(n: int, s: int, degree: int):
    rng = np.random.default_rng(11)
    for _ in range(20):
        p = random_sparse(n, s, degree, rng, constant=False)
        assert p.sparsity == s
        assert p.degree <= degree
        assert () not in p.monomials


def test_random_sparse_universe_too_small():
    with pytest.raises(ValueError):
        random_sparse(3, 5, 1, np.random.default_rng(0))


def test_relevant_variables():
    assert relevant_variables(canonicalize([(1, 4), (4, 6), ()], 8)) == {1, 4, 6}


def test_zero_fraction():
    assert zero_fraction(SparsePoly.zero(5)) == 1
    assert zero_fraction(canonicalize([()], 5)) == 0
    assert zero_fraction(canonicalize([(1, 2), (3, 4, 5)], 5)) == Dyadic(22, 5)


def test_distance_to_sparse_class():
    p = canonicalize([(1, 2), (3,)], 4)
    d, witness = distance_to_sparse_class(p, 4, 2)
    assert d == 0 and witness == p

    d, witness = distance_to_sparse_class(SparsePoly.zero(3), 3, 1)
    assert d == 0 and witness.sparsity == 0

    # no 1-sparse polynomial comes closer than 1/4 to x1 OR x2
    d, witness = distance_to_sparse_class(canonicalize([(1,), (2,), (1, 2)], 2), 2, 1)
    assert d == Dyadic(1, 2)
    assert distance(witness, canonicalize([(1,), (2,), (1, 2)], 2)) == d


def test_distance_to_sparse_class_caps():
    with pytest.raises(CapExceeded):
        distance_to_sparse_class(SparsePoly.zero(9), 9, 1)
    with pytest.raises(CapExceeded):
        distance_to_sparse_class(SparsePoly.zero(4), 4, 3)
