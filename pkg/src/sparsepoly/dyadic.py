"""Exact dyadic fractions: a count over a power of two.

Every enumeration oracle reports its answer as a Dyadic so lemma checks
compare with zero tolerance.  Comparison against a float is exact: the
float is converted to the fraction it denotes.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from numbers import Rational
from typing import Union

__all__ = ["Dyadic"]

Comparable = Union["Dyadic", int, float, Fraction]


def _fraction(value: Comparable) -> Fraction:
    if isinstance(value, Dyadic):
        return value.fraction
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    return NotImplemented


@total_ordering
@dataclass(frozen=True, eq=False)
class Dyadic:
    """The value num / 2**exp, kept normalised.

    Examples:
        >>> Dyadic(6, 3)
        Dyadic(3/2^2)
        >>> Dyadic(1, 1) + Dyadic(1, 2)
        Dyadic(3/2^2)
        >>> Dyadic(1, 2) == 0.25
        True
        >>> Dyadic(3, 2) < Fraction(4, 5)
        True
        >>> str(Dyadic(0, 9))
        '0'
    """

    num: int
    exp: int = 0

    def __post_init__(self):
        if self.exp < 0:
            raise ValueError("exponent must be non-negative")
        num, exp = int(self.num), int(self.exp)
        if num == 0:
            exp = 0
        while exp > 0 and num % 2 == 0:
            num //= 2
            exp -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    @classmethod
    def of(cls, count: int, total: int) -> "Dyadic":
        """Create count/total where total is a power of two."""
        if total <= 0 or total & (total - 1):
            raise ValueError(f"{total} is not a power of two")
        return cls(count, total.bit_length() - 1)

    @property
    def fraction(self) -> Fraction:
        """The same value as a Fraction."""
        return Fraction(self.num, 1 << self.exp)

    def half(self) -> "Dyadic":
        """Half of this value, exactly."""
        return Dyadic(self.num, self.exp + 1)

    def _align(self, other: "Dyadic"):
        exp = max(self.exp, other.exp)
        return self.num << (exp - self.exp), other.num << (exp - other.exp), exp

    def __add__(self, other):
        if isinstance(other, int):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        a, b, exp = self._align(other)
        return Dyadic(a + b, exp)

    __radd__ = __add__

    def __neg__(self):
        return Dyadic(-self.num, self.exp)

    def __sub__(self, other):
        if isinstance(other, int):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        if isinstance(other, int):
            return Dyadic(other) - self
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, int):
            other = Dyadic(other)
        if not isinstance(other, Dyadic):
            return NotImplemented
        return Dyadic(self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        value = _fraction(other)
        if value is NotImplemented:
            return NotImplemented
        return self.fraction == value

    def __lt__(self, other) -> bool:
        value = _fraction(other)
        if value is NotImplemented:
            return NotImplemented
        return self.fraction < value

    def __hash__(self):
        return hash(self.fraction)

    def __float__(self) -> float:
        return self.num / (1 << self.exp)

    def __str__(self) -> str:
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/2^{self.exp}"

    def __repr__(self) -> str:
        return f"Dyadic({self})"
