"""Variation, influence and the two-query independence test.

The variation of f on a set I of coordinates is the expected variance of f
over a uniform z in {0,1}^I, with the remaining coordinates w fixed at
random: Vr_f(I) = E_w[1 - (E_z f(w u z))**2] for f valued in {-1, 1}.
The independence test rejects with probability exactly Vr_f(I) / 2.

    >>> from sparsepoly.gf2poly import canonicalize
    >>> variation_exact(canonicalize([(1, 2)], 2), [1, 2])
    Dyadic(3/2^2)
    >>> influence_exact(canonicalize([(1, 2)], 2), 1)
    Dyadic(1/2^1)
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from sparsepoly.blackbox import BlackBox
from sparsepoly.dyadic import Dyadic
from sparsepoly.errors import IndexOutOfRange
from sparsepoly.gf2poly import (
    SparsePoly,
    TruthTable,
    all_assignments,
    as_table,
    canonicalize,
    random_assignments,
    relevant_variables,
    truth_table,
)

__all__ = [
    "VariationEstimate",
    "all_variations_exact",
    "disagreement_exact",
    "exact_table",
    "independence_test_once",
    "independence_tests",
    "influence_exact",
    "junta_variations_exact",
    "variation_estimate",
    "variation_exact",
]

logger = logging.getLogger(__name__)

Function = Union[BlackBox, TruthTable, SparsePoly]


@dataclass(frozen=True)
class VariationEstimate:
    """Twice the reject frequency of M independence tests on a subset."""

    value: float
    samples: int
    subject: Tuple[int, ...]
    rejections: int = 0
    exact: Optional[Dyadic] = None

    def as_dict(self) -> dict:
        """Plain values for reports."""
        out = {"value": self.value, "samples": self.samples, "size": len(self.subject)}
        if self.exact is not None:
            out["exact"] = str(self.exact)
        return out


def exact_table(f: Function, cap: Optional[int] = None) -> TruthTable:
    """Truth table of f; an oracle is enumerated, spending 2**n queries."""
    if isinstance(f, BlackBox):
        signs = f.query_many(all_assignments(f.n, cap))
        return TruthTable(f.n, (signs < 0).astype(np.uint8))
    return as_table(f, cap)


def _subset(I: Iterable[int], n: int) -> Tuple[int, ...]:
    subset = tuple(sorted(set(int(i) for i in I)))
    for i in subset:
        if not 1 <= i <= n:
            raise IndexOutOfRange(f"variable {i} not within [1, {n}]")
    return subset


def _cube(t: TruthTable) -> np.ndarray:
    # axis n - i of the cube belongs to variable i
    return t.bits.reshape((2,) * t.n) if t.n else t.bits.reshape(())


def _minus_counts(t: TruthTable, subset: Tuple[int, ...]) -> np.ndarray:
    """For each w, the number of z with f(w u z) = -1."""
    axes = tuple(t.n - i for i in subset)
    return _cube(t).astype(np.int64).sum(axis=axes)


def variation_exact(f: Function, I: Iterable[int], cap: Optional[int] = None) -> Dyadic:
    """Vr_f(I) computed by enumeration.

    Summing S(w) = sum_z f(w u z) gives Vr = 1 - sum_w S(w)**2 / 2**(n + |I|).
    """
    t = exact_table(f, cap)
    subset = _subset(I, t.n)
    minus = _minus_counts(t, subset)
    sums = (1 << len(subset)) - 2 * minus
    squares = int(np.sum(sums.astype(np.int64) ** 2))
    exp = t.n + len(subset)
    return Dyadic((1 << exp) - squares, exp)


def disagreement_exact(f: Function, I: Iterable[int], cap: Optional[int] = None) -> Dyadic:
    """Pr[f(w u z1) != f(w u z2)] over uniform w, z1, z2, by enumeration.

    For each w with a points of value 1 and b of value -1 among the z,
    2ab of the (z1, z2) pairs disagree.
    """
    t = exact_table(f, cap)
    subset = _subset(I, t.n)
    minus = _minus_counts(t, subset).astype(object)
    plus = (1 << len(subset)) - minus
    pairs = int(np.sum(2 * plus * minus))
    return Dyadic(pairs, t.n + len(subset))


def influence_exact(f: Function, i: int, cap: Optional[int] = None) -> Dyadic:
    """Fraction of x whose i-th flip changes f."""
    t = exact_table(f, cap)
    _subset((i,), t.n)
    index = np.arange(1 << t.n, dtype=np.int64)
    changed = np.count_nonzero(t.bits != t.bits[index ^ (1 << (i - 1))])
    return Dyadic(int(changed), t.n)


def all_variations_exact(f: Function, cap: Optional[int] = None) -> List[Dyadic]:
    """Vr_f(i) for i = 1..n; entry i - 1 belongs to variable i."""
    t = exact_table(f, cap)
    return [influence_exact(t, i) for i in range(1, t.n + 1)]


def junta_variations_exact(
    p: SparsePoly, subsets: Iterable[Iterable[int]], cap: Optional[int] = None
) -> List[Dyadic]:
    """Vr_p(I) for each I, enumerating only the variables p depends on.

    Usable at any n as long as p has few relevant variables.

    >>> p = canonicalize([(3, 40)], 64)
    >>> [str(v) for v in junta_variations_exact(p, [(3,), (1, 2), (3, 40, 64)])]
    ['1/2^1', '0', '3/2^2']
    """
    relevant = sorted(relevant_variables(p))
    index = {v: k for k, v in enumerate(relevant, 1)}
    junta = truth_table(canonicalize([[index[i] for i in m] for m in p.monomials], len(relevant)), cap)
    out = []
    for I in subsets:
        _subset(I, p.n)
        out.append(variation_exact(junta, [index[i] for i in I if i in index]))
    return out


def independence_tests(f: BlackBox, I: Iterable[int], runs: int, rng: np.random.Generator) -> np.ndarray:
    """Run the independence test `runs` times; True marks a rejection.

    Each run draws w over the coordinates outside I and z1, z2 over I, and
    rejects iff f(w u z1) != f(w u z2).  Costs exactly 2 * runs queries.
    """
    subset = _subset(I, f.n)
    columns = np.array(subset, dtype=np.intp) - 1
    first = random_assignments(rng, runs, f.n)
    second = first.copy()
    second[:, columns] = random_assignments(rng, runs, len(subset))
    first[:, columns] = random_assignments(rng, runs, len(subset))
    answers = f.query_many(np.concatenate((first, second)))
    return answers[:runs] != answers[runs:]


def independence_test_once(f: BlackBox, I: Iterable[int], rng: np.random.Generator) -> bool:
    """One independence test; True if it accepts.  Costs 2 queries."""
    return not bool(independence_tests(f, I, 1, rng)[0])


def variation_estimate(f: BlackBox, I: Sequence[int], M: int, rng: np.random.Generator) -> VariationEstimate:
    """Estimate Vr_f(I) as 2 * rejects / M from M independence tests.

    The estimate is reported as drawn, never clamped.
    """
    if M < 1:
        raise ValueError("need at least one independence test")
    subset = _subset(I, f.n)
    rejections = int(np.count_nonzero(independence_tests(f, subset, M, rng)))
    return VariationEstimate(2 * rejections / M, M, subset, rejections)
