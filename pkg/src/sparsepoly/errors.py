"""Exceptions raised by sparsepoly.

Probabilistic outcomes of the tester (a failed SHIV call, a rejected
closeness check) are results, not exceptions.  Everything here signals
misuse or a request the exact oracles refuse to approximate.
"""

__all__ = [
    "CapExceeded",
    "DimensionError",
    "EmptyGrid",
    "FormatError",
    "IndexOutOfRange",
    "MembershipQueryFailed",
    "ParameterError",
    "SparsePolyError",
]


class SparsePolyError(Exception):
    """Base of every sparsepoly error."""


class DimensionError(SparsePolyError, ValueError):
    """An assignment or table does not match the variable count."""


class IndexOutOfRange(SparsePolyError, ValueError):
    """A variable index lies outside [1, n]."""


class CapExceeded(SparsePolyError):
    """An exhaustive oracle was asked to enumerate beyond its cap."""


class ParameterError(SparsePolyError, ValueError):
    """Tester parameters are nonpositive or inconsistent."""


class EmptyGrid(ParameterError):
    """The alpha grid has no points: 8 * delta > tau / (4 s^2)."""


class FormatError(SparsePolyError, ValueError):
    """A polynomial, truth-table or profile file is malformed."""


class MembershipQueryFailed(SparsePolyError):
    """A simulated membership query answered 'fail'."""
