"""Sparse multilinear GF(2) polynomials and their exact oracles.

A polynomial is a parity of monotone conjunctions.  Monomials are sorted
tuples of 1-based variable indices; the empty tuple is the constant 1.

Assignments index truth tables with variable 1 in the least significant
bit, so assignment number 6 over three variables is x = (0, 1, 1).

    >>> p = canonicalize([(1, 2), (3,)], 3)
    >>> evaluate(p, (1, 1, 0))
    1
    >>> str(restrict(p, {3: 0}))
    'x1*x2'
"""
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from sparsepoly import config
from sparsepoly.dyadic import Dyadic
from sparsepoly.errors import CapExceeded, DimensionError, IndexOutOfRange

__all__ = [
    "Monomial",
    "SparsePoly",
    "TruthTable",
    "all_assignments",
    "as_table",
    "canonicalize",
    "distance",
    "distance_to_sparse_class",
    "evaluate",
    "evaluate_many",
    "mobius_interpolate",
    "random_assignments",
    "random_sparse",
    "random_truth_table",
    "relevant_variables",
    "restrict",
    "truth_table",
    "zero_fraction",
]

Monomial = Tuple[int, ...]

# A small universe is enumerated outright when drawing random monomials.
_ENUMERATE_UNIVERSE = 1 << 16


def _check_cap(n: int, cap: Optional[int]) -> None:
    if cap is None:
        cap = config.get_enum_cap()
    if n > cap:
        raise CapExceeded(f"n={n} exceeds the enumeration cap of {cap}")


def _sort_key(monomial: Monomial):
    return (len(monomial), monomial)


def _monomial_of(mask: int) -> Monomial:
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


@dataclass(frozen=True)
class SparsePoly:
    """Canonical polynomial over n variables: a set of distinct monomials."""

    n: int
    monomials: FrozenSet[Monomial]

    def __post_init__(self):
        if self.n < 0:
            raise DimensionError("variable count must be non-negative")
        terms = frozenset(tuple(sorted(set(m))) for m in self.monomials)
        for m in terms:
            if m and (m[0] < 1 or m[-1] > self.n):
                raise IndexOutOfRange(f"monomial {m} not within [1, {self.n}]")
        object.__setattr__(self, "monomials", terms)

    @classmethod
    def zero(cls, n: int) -> "SparsePoly":
        """The zero polynomial over n variables."""
        return cls(n, frozenset())

    @property
    def sparsity(self) -> int:
        """Number of monomials."""
        return len(self.monomials)

    @property
    def degree(self) -> int:
        """Largest monomial length; 0 for constants and the zero polynomial."""
        return max((len(m) for m in self.monomials), default=0)

    @property
    def terms(self) -> List[Monomial]:
        """Monomials ordered by degree, then lexicographically."""
        return sorted(self.monomials, key=_sort_key)

    @property
    def masks(self) -> List[int]:
        """Monomials as bit masks, variable 1 in bit 0."""
        return [sum(1 << (i - 1) for i in m) for m in self.terms]

    @cached_property
    def _columns(self) -> Tuple[np.ndarray, ...]:
        return tuple(np.array(m, dtype=np.intp) - 1 for m in self.terms)

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        return " + ".join("*".join(f"x{i}" for i in m) if m else "1" for m in self.terms)


@dataclass(frozen=True, eq=False)
class TruthTable:
    """The 2**n output bits of a function, assignment index as the key."""

    n: int
    bits: np.ndarray

    def __post_init__(self):
        bits = np.array(self.bits, dtype=np.uint8).reshape(-1)
        if self.n < 0 or bits.size != 1 << self.n:
            raise DimensionError(f"a table over {self.n} variables has {1 << max(self.n, 0)} bits, not {bits.size}")
        if bits.size and bits.max() > 1:
            raise DimensionError("truth table entries must be 0 or 1")
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.n, self.bits.tobytes()))

    def __len__(self) -> int:
        return self.bits.size

    def __getitem__(self, index: int) -> int:
        return int(self.bits[index])

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)


def canonicalize(raw: Iterable[Iterable[int]], n: int) -> SparsePoly:
    """Cancel monomials that appear an even number of times.

    Examples:
        >>> canonicalize([(1, 2), (2, 1), (3,)], 3).terms
        [(3,)]
        >>> canonicalize([], 2).sparsity
        0
        >>> canonicalize([(2,), (1,)], 2).terms
        [(1,), (2,)]
    """
    counts: Counter = Counter()
    for m in raw:
        term = tuple(sorted(set(m)))
        for i in term:
            if not 1 <= i <= n:
                raise IndexOutOfRange(f"variable {i} not within [1, {n}]")
        counts[term] += 1
    return SparsePoly(n, frozenset(m for m, k in counts.items() if k % 2))


def evaluate(p: SparsePoly, x: Sequence[int]) -> int:
    """XOR over monomials of the AND of their variables."""
    if len(x) != p.n:
        raise DimensionError(f"assignment has {len(x)} bits, polynomial has {p.n} variables")
    value = 0
    for m in p.monomials:
        value ^= all(x[i - 1] for i in m)
    return int(value)


def evaluate_many(p: SparsePoly, X: np.ndarray) -> np.ndarray:
    """Evaluate p on every row of a (k, n) bit matrix."""
    X = np.asarray(X, dtype=bool)
    if X.ndim != 2 or X.shape[1] != p.n:
        raise DimensionError(f"expected rows of {p.n} bits, got shape {X.shape}")
    out = np.zeros(X.shape[0], dtype=np.uint8)
    for columns in p._columns:
        if columns.size:
            out ^= X[:, columns].all(axis=1)
        else:
            out ^= 1
    return out


def restrict(p: SparsePoly, fixing: Mapping[int, int]) -> SparsePoly:
    """Fix variables to constants; the ambient n is unchanged.

    A variable fixed to 0 deletes every monomial containing it; one fixed
    to 1 is deleted from its monomials, then like terms cancel.

    Examples:
        >>> p = canonicalize([(1, 2), (2,)], 2)
        >>> restrict(p, {1: 1}).sparsity
        0
        >>> restrict(canonicalize([(1, 2, 3)], 3), {2: 1}).terms
        [(1, 3)]
    """
    for i in fixing:
        if not 1 <= i <= p.n:
            raise IndexOutOfRange(f"variable {i} not within [1, {p.n}]")
    kept = []
    for m in p.monomials:
        if any(fixing.get(i) == 0 for i in m):
            continue
        kept.append(tuple(i for i in m if i not in fixing))
    return canonicalize(kept, p.n)


def relevant_variables(p: SparsePoly) -> FrozenSet[int]:
    """Variables that appear in some monomial of the canonical form."""
    return frozenset(i for m in p.monomials for i in m)


def _zeta(a: np.ndarray, n: int) -> None:
    """Subset-sum transform over GF(2), in place; it is its own inverse."""
    for i in range(n):
        view = a.reshape(-1, 2, 1 << i)
        view[:, 1, :] ^= view[:, 0, :]


def truth_table(p: SparsePoly, cap: Optional[int] = None) -> TruthTable:
    """Exact truth table of p.

    >>> str(truth_table(canonicalize([(1, 2)], 2)))
    '0001'
    """
    _check_cap(p.n, cap)
    a = np.zeros(1 << p.n, dtype=np.uint8)
    a[p.masks] = 1
    _zeta(a, p.n)
    return TruthTable(p.n, a)


def mobius_interpolate(t: TruthTable) -> SparsePoly:
    """The unique multilinear polynomial whose truth table is t.

    Examples:
        >>> mobius_interpolate(TruthTable(2, [0, 0, 0, 1])).terms
        [(1, 2)]
        >>> mobius_interpolate(TruthTable(2, [1, 1, 1, 1])).terms
        [()]
        >>> mobius_interpolate(TruthTable(2, [0, 1, 1, 0])).terms
        [(1,), (2,)]
    """
    a = t.bits.copy()
    _zeta(a, t.n)
    return SparsePoly(t.n, frozenset(_monomial_of(int(m)) for m in np.flatnonzero(a)))


def as_table(f: Union[TruthTable, SparsePoly], cap: Optional[int] = None) -> TruthTable:
    """Get a truth table of a polynomial or table."""
    if isinstance(f, TruthTable):
        _check_cap(f.n, cap)
        return f
    return truth_table(f, cap)


def distance(
    f: Union[TruthTable, SparsePoly],
    g: Union[TruthTable, SparsePoly],
    n: Optional[int] = None,
    cap: Optional[int] = None,
) -> Dyadic:
    """Fraction of assignments on which f and g disagree.

    >>> x1 = canonicalize([(1,)], 2)
    >>> distance(x1, canonicalize([(1,), (2,)], 2))
    Dyadic(1/2^1)
    """
    a, b = as_table(f, cap), as_table(g, cap)
    if a.n != b.n or (n is not None and n != a.n):
        raise DimensionError(f"cannot compare functions over {a.n} and {b.n} variables")
    return Dyadic(int(np.count_nonzero(a.bits != b.bits)), a.n)


def distance_to_sparse_class(
    f: Union[TruthTable, SparsePoly],
    n: int,
    s: int,
    n_cap: Optional[int] = None,
    s_cap: Optional[int] = None,
) -> Tuple[Dyadic, SparsePoly]:
    """Exhaustive distance from f to the polynomials with at most s monomials.

    Returns the minimum and the first minimiser found, searching smaller
    sparsities first and then monomial masks in increasing order.

    >>> parity = canonicalize([(1,), (2,), (3,)], 3)
    >>> d, w = distance_to_sparse_class(parity, 3, 1)
    >>> d, str(w)
    (Dyadic(3/2^3), 'x1*x2*x3')
    """
    default_n, default_s = config.get_class_caps()
    n_cap = default_n if n_cap is None else n_cap
    s_cap = default_s if s_cap is None else s_cap
    if n > n_cap or s > s_cap:
        raise CapExceeded(f"class search over n={n}, s={s} exceeds caps n<={n_cap}, s<={s_cap}")
    if s < 0:
        raise ValueError("sparsity must be non-negative")
    target = as_table(f, n_cap).bits
    if target.size != 1 << n:
        raise DimensionError(f"function is not over {n} variables")

    size = 1 << n
    points = np.arange(size)
    # monomial_tables[m, x] == 1 iff the monomial with mask m is 1 at x
    monomial_tables = ((points[None, :] & points[:, None]) == points[:, None]).astype(np.uint8)

    best = int(np.count_nonzero(target))
    witness: Tuple[int, ...] = ()
    for k in range(1, min(s, size) + 1):
        for prefix in itertools.combinations(range(size), k - 1):
            acc = target.copy()
            for m in prefix:
                acc ^= monomial_tables[m]
            start = prefix[-1] + 1 if prefix else 0
            if start >= size:
                continue
            counts = np.count_nonzero(monomial_tables[start:] ^ acc, axis=1)
            j = int(np.argmin(counts))
            if counts[j] < best:
                best = int(counts[j])
                witness = prefix + (start + j,)
        if best == 0:
            break
    poly = SparsePoly(n, frozenset(_monomial_of(m) for m in witness))
    return Dyadic(best, n), poly


def zero_fraction(p: Union[SparsePoly, TruthTable], cap: Optional[int] = None) -> Dyadic:
    """Fraction of assignments where p is 0.

    >>> zero_fraction(canonicalize([(1,), (1, 2)], 2))
    Dyadic(3/2^2)
    """
    bits = as_table(p, cap).bits
    return Dyadic(int(bits.size - np.count_nonzero(bits)), p.n)


def all_assignments(n: int, cap: Optional[int] = None) -> np.ndarray:
    """Every assignment as a (2**n, n) bit matrix, row k being assignment k."""
    _check_cap(n, cap)
    index = np.arange(1 << n, dtype=np.int64)
    return ((index[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def random_assignments(rng: np.random.Generator, k: int, n: int) -> np.ndarray:
    """Draw k uniform assignments as a (k, n) bit matrix."""
    if n == 0:
        return np.zeros((k, 0), dtype=bool)
    raw = rng.integers(0, 256, size=(k, (n + 7) // 8), dtype=np.uint8)
    return np.unpackbits(raw, axis=1, count=n, bitorder="little").astype(bool)


def random_truth_table(n: int, rng: np.random.Generator, cap: Optional[int] = None) -> TruthTable:
    """A uniformly random function over n variables."""
    _check_cap(n, cap)
    return TruthTable(n, rng.integers(0, 2, size=1 << n, dtype=np.uint8))


def random_sparse(
    n: int,
    s: int,
    max_degree: int,
    rng: np.random.Generator,
    constant: bool = True,
) -> SparsePoly:
    """Draw s distinct monomials of degree at most max_degree.

    Every monomial of the universe is equally likely.  With constant=False
    the constant-1 monomial is excluded from the universe.
    """
    if s < 0 or not 0 <= max_degree <= n:
        raise ValueError(f"need s >= 0 and 0 <= max_degree <= n, got s={s}, max_degree={max_degree}")
    low = 0 if constant else 1
    sizes = [math.comb(n, d) for d in range(low, max_degree + 1)]
    universe = sum(sizes)
    if s > universe:
        raise ValueError(f"only {universe} monomials of degree <= {max_degree} over {n} variables")
    if s == 0:
        return SparsePoly.zero(n)

    if universe <= _ENUMERATE_UNIVERSE:
        pool = [m for d in range(low, max_degree + 1) for m in itertools.combinations(range(1, n + 1), d)]
        picks = rng.choice(len(pool), size=s, replace=False)
        return SparsePoly(n, frozenset(pool[int(i)] for i in picks))

    weights = np.array(sizes, dtype=float) / universe
    chosen = set()
    while len(chosen) < s:
        d = low + int(rng.choice(len(sizes), p=weights))
        chosen.add(tuple(sorted(int(i) + 1 for i in rng.choice(n, size=d, replace=False))))
    return SparsePoly(n, frozenset(chosen))
