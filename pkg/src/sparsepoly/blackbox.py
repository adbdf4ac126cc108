"""Query-counted black-box oracles f: {0,1}^n -> {-1,1}.

A polynomial p is seen through the oracle as f(x) = (-1)**p(x); this is the
only place the {0,1} -> {-1,1} mapping happens.  Wrapping oracles
(zero-restriction, flip noise) spend one query of the wrapped oracle per
query, and only the innermost oracle charges the shared QueryLedger.

    >>> from sparsepoly.gf2poly import canonicalize
    >>> f = make_poly_oracle(canonicalize([(1,)], 2))
    >>> f.query((1, 0)), f.query((0, 1)), f.query_count
    (-1, 1, 2)
"""
import threading
from abc import ABC, abstractmethod
from contextlib import contextmanager
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from sparsepoly import formats
from sparsepoly.errors import DimensionError, IndexOutOfRange, ParameterError
from sparsepoly.gf2poly import SparsePoly, TruthTable, evaluate_many

__all__ = [
    "BlackBox",
    "Phase",
    "QueryLedger",
    "flip_noise_oracle",
    "make_poly_oracle",
    "make_table_oracle",
    "read_oracle",
    "zero_restricted_oracle",
]


class Phase(str, Enum):
    """Where a query is spent."""

    VARIATION = "variation"
    CLOSENESS = "closeness"
    SHIV = "shiv"
    EQUIVALENCE = "equivalence"
    OTHER = "other"


class QueryLedger:
    """Per-phase query counts; queries go to the phase currently selected."""

    def __init__(self):
        self.counts: Dict[str, int] = {p.value: 0 for p in Phase}
        self.current = Phase.OTHER
        self._lock = threading.Lock()

    @property
    def total(self) -> int:
        """Queries over all phases."""
        return sum(self.counts.values())

    def charge(self, queries: int) -> None:
        """Charge queries to the current phase."""
        with self._lock:
            self.counts[self.current.value] += queries

    @contextmanager
    def phase(self, phase: Phase) -> Iterator["QueryLedger"]:
        """Charge queries made inside the block to `phase`.

        >>> ledger = QueryLedger()
        >>> with ledger.phase(Phase.CLOSENESS):
        ...     ledger.charge(3)
        >>> ledger.counts["closeness"], ledger.current
        (3, <Phase.OTHER: 'other'>)
        """
        previous, self.current = self.current, phase
        try:
            yield self
        finally:
            self.current = previous

    def as_dict(self) -> Dict[str, int]:
        """Counts by phase plus the total."""
        return {**self.counts, "total": self.total}


class BlackBox(ABC):
    """Oracle over n variables counting every evaluation."""

    def __init__(self, n: int, ledger: Optional[QueryLedger] = None):
        self.n = n
        self.query_count = 0
        self.ledger = ledger if ledger is not None else QueryLedger()
        self._lock = threading.Lock()

    @property
    def root(self) -> bool:
        """Whether this oracle charges the ledger itself."""
        return True

    def query(self, x: Sequence[int]) -> int:
        """Evaluate f at one assignment; returns -1 or 1."""
        row = np.asarray(x, dtype=bool).reshape(1, -1)
        return int(self.query_many(row)[0])

    def query_many(self, X: np.ndarray) -> np.ndarray:
        """Evaluate f on every row of a (k, n) bit matrix; costs k queries."""
        X = np.asarray(X, dtype=bool)
        if X.ndim != 2 or X.shape[1] != self.n:
            raise DimensionError(f"expected rows of {self.n} bits, got shape {X.shape}")
        with self._lock:
            self.query_count += X.shape[0]
        if self.root:
            self.ledger.charge(X.shape[0])
        return self._answer(X)

    @abstractmethod
    def _answer(self, X: np.ndarray) -> np.ndarray:
        """Signs in {-1, 1} as int8 for each row of X."""


def _signs(bits: np.ndarray) -> np.ndarray:
    return (1 - 2 * bits.astype(np.int8)).astype(np.int8)


class PolyOracle(BlackBox):
    """Oracle of (-1)**p(x)."""

    def __init__(self, p: SparsePoly, ledger: Optional[QueryLedger] = None):
        super().__init__(p.n, ledger)
        self.poly = p

    def _answer(self, X):
        return _signs(evaluate_many(self.poly, X))


class TableOracle(BlackBox):
    """Oracle of (-1)**t[x] for a truth table t."""

    def __init__(self, t: TruthTable, ledger: Optional[QueryLedger] = None):
        super().__init__(t.n, ledger)
        self.table = t
        self._weights = np.left_shift(1, np.arange(t.n, dtype=np.int64))

    def _answer(self, X):
        return _signs(self.table.bits[X.astype(np.int64) @ self._weights])


class _Wrapper(BlackBox):
    def __init__(self, inner: BlackBox):
        super().__init__(inner.n, inner.ledger)
        self.inner = inner

    @property
    def root(self) -> bool:
        return False


class ZeroRestrictedOracle(_Wrapper):
    """f with the coordinates in `zeroed` forced to 0."""

    def __init__(self, inner: BlackBox, zeroed: Iterable[int]):
        super().__init__(inner)
        self.zeroed = tuple(sorted(set(zeroed)))
        for i in self.zeroed:
            if not 1 <= i <= self.n:
                raise IndexOutOfRange(f"variable {i} not within [1, {self.n}]")
        self._columns = np.array(self.zeroed, dtype=np.intp) - 1

    def _answer(self, X):
        if self._columns.size:
            X = X.copy()
            X[:, self._columns] = False
        return self.inner.query_many(X)


_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def _mix(z: np.ndarray) -> np.ndarray:
    """The splitmix64 finaliser, elementwise on uint64 arrays."""
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def keyed_hash(X: np.ndarray, key: int) -> np.ndarray:
    """A 64-bit keyed hash of each row of a bit matrix."""
    packed = np.packbits(np.asarray(X, dtype=bool), axis=1, bitorder="little")
    pad = -packed.shape[1] % 8
    if pad:
        packed = np.pad(packed, ((0, 0), (0, pad)))
    words = np.ascontiguousarray(packed).view("<u8").astype(np.uint64)
    h = np.full(packed.shape[0], key, dtype=np.uint64)
    for column in words.T:
        h = _mix((h ^ column) + _GOLDEN)
    return _mix(h + _GOLDEN)


class FlipNoiseOracle(_Wrapper):
    """f with its sign flipped on a keyed-hash subset of given density."""

    def __init__(self, inner: BlackBox, fraction: Union[Fraction, float, int], seed: int):
        super().__init__(inner)
        self.fraction = Fraction(fraction)
        if not 0 <= self.fraction <= 1:
            raise ValueError(f"noise fraction {fraction} not within [0, 1]")
        self.seed = seed
        self._key = int(np.random.SeedSequence(seed).generate_state(1, np.uint64)[0])
        self._threshold = int(self.fraction * (1 << 64))

    def flipped(self, X: np.ndarray) -> np.ndarray:
        """Which rows of X lie in the flip set."""
        if self._threshold >= 1 << 64:
            return np.ones(len(X), dtype=bool)
        return keyed_hash(X, self._key) < np.uint64(self._threshold)

    def _answer(self, X):
        signs = self.inner.query_many(X)
        return np.where(self.flipped(X), -signs, signs).astype(np.int8)


def make_poly_oracle(p: SparsePoly) -> BlackBox:
    """Oracle of (-1)**p(x) with a fresh counter and ledger."""
    return PolyOracle(p)


def make_table_oracle(t: TruthTable) -> BlackBox:
    """Oracle of (-1)**t[x] with a fresh counter and ledger."""
    return TableOracle(t)


def zero_restricted_oracle(f: BlackBox, zeroed: Iterable[int]) -> BlackBox:
    """Oracle of f with every coordinate in `zeroed` forced to 0."""
    return ZeroRestrictedOracle(f, zeroed)


def flip_noise_oracle(f: BlackBox, fraction: Union[Fraction, float, int], seed: int) -> BlackBox:
    """Oracle of f flipped on a seed-determined set of density `fraction`."""
    return FlipNoiseOracle(f, fraction, seed)


def read_oracle(poly: Optional[Path] = None, table: Optional[Path] = None) -> BlackBox:
    """Oracle backed by a polynomial file or a truth-table file."""
    if (poly is None) == (table is None):
        raise ParameterError("give exactly one of --poly or --table")
    if poly is not None:
        return make_poly_oracle(formats.read_poly(poly))
    return make_table_oracle(formats.read_table(table))
