"""Closed real intervals with outward-rounded endpoints.

Every operation returns an interval guaranteed to contain the exact real
result for every choice of operands inside the argument intervals.  Rounding
is done by the primitives in :mod:`discproof._fp`, which never change the FPU
rounding mode, so all operations are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from . import _fp

Real = Union[int, float]


class IntervalError(ArithmeticError):
    """Base class for interval arithmetic failures."""


class IntervalDomainError(IntervalError, ValueError):
    """The argument has no point inside the function's domain."""


class IntervalDivisionByZero(IntervalError, ZeroDivisionError):
    """Division by an interval containing zero."""


class EmptyIntersection(IntervalError):
    """Two intervals that were expected to overlap are disjoint."""


@dataclass(frozen=True, slots=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise IntervalError(f"NaN endpoint in [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise IntervalError(f"inverted interval [{self.lo}, {self.hi}]")

    # -- construction -----------------------------------------------------

    @classmethod
    def point(cls, x: Real) -> Interval:
        """Degenerate interval at a double (ints are converted exactly)."""
        if isinstance(x, int):
            return cls.from_fraction(Fraction(x))
        x = float(x)
        return cls(x, x)

    @classmethod
    def from_fraction(cls, q: Fraction) -> Interval:
        """Tightest double interval around an exact rational."""
        f = float(q)
        lo = f if Fraction(f) <= q else _fp.next_dn(f)
        hi = f if Fraction(f) >= q else _fp.next_up(f)
        return cls(lo, hi)

    @classmethod
    def from_decimal(cls, text: str) -> Interval:
        """Enclose a decimal literal such as ``"0.12"`` exactly."""
        return cls.from_fraction(Fraction(text))

    # -- queries -----------------------------------------------------------

    @property
    def width(self) -> float:
        return _fp.sub_up(self.hi, self.lo)

    @property
    def mid(self) -> float:
        return 0.5 * self.lo + 0.5 * self.hi

    def contains(self, x: Union[Real, Interval]) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, int):
            q = Fraction(x)
            return Fraction(self.lo) <= q <= Fraction(self.hi)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def overlaps(self, other: Interval) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: Interval) -> Interval:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise EmptyIntersection(f"{self} and {other} are disjoint")
        return Interval(lo, hi)

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo)

    def __add__(self, other) -> Interval:
        o = _coerce(other)
        return Interval(_fp.add_dn(self.lo, o.lo), _fp.add_up(self.hi, o.hi))

    __radd__ = __add__

    def __sub__(self, other) -> Interval:
        o = _coerce(other)
        return Interval(_fp.sub_dn(self.lo, o.hi), _fp.sub_up(self.hi, o.lo))

    def __rsub__(self, other) -> Interval:
        return _coerce(other) - self

    def __mul__(self, other) -> Interval:
        o = _coerce(other)
        a0, a1, b0, b1 = self.lo, self.hi, o.lo, o.hi
        if a0 >= 0.0 and b0 >= 0.0:
            return Interval(_fp.mul_dn(a0, b0), _fp.mul_up(a1, b1))
        lo = min(_fp.mul_dn(a0, b0), _fp.mul_dn(a0, b1),
                 _fp.mul_dn(a1, b0), _fp.mul_dn(a1, b1))
        hi = max(_fp.mul_up(a0, b0), _fp.mul_up(a0, b1),
                 _fp.mul_up(a1, b0), _fp.mul_up(a1, b1))
        return Interval(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other) -> Interval:
        o = _coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise IntervalDivisionByZero(f"{self} / {o}")
        a0, a1, b0, b1 = self.lo, self.hi, o.lo, o.hi
        if a0 >= 0.0 and b0 > 0.0:
            return Interval(_fp.div_dn(a0, b1), _fp.div_up(a1, b0))
        lo = min(_fp.div_dn(a0, b0), _fp.div_dn(a0, b1),
                 _fp.div_dn(a1, b0), _fp.div_dn(a1, b1))
        hi = max(_fp.div_up(a0, b0), _fp.div_up(a0, b1),
                 _fp.div_up(a1, b0), _fp.div_up(a1, b1))
        return Interval(lo, hi)

    def __rtruediv__(self, other) -> Interval:
        return _coerce(other) / self

    def sqr(self) -> Interval:
        """x**2 without the dependency blow-up of ``self * self``."""
        a = abs_iv(self)
        return Interval(_fp.mul_dn(a.lo, a.lo), _fp.mul_up(a.hi, a.hi))

    def __pow__(self, n: int) -> Interval:
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        if n == 0:
            return ONE
        if n % 2 == 0:
            return (self ** (n // 2)).sqr()
        return self * self ** (n - 1)

    # -- comparisons (certain, not possible) ----------------------------------

    def certainly_lt(self, other) -> bool:
        return self.hi < _coerce(other).lo

    def certainly_gt(self, other) -> bool:
        return self.lo > _coerce(other).hi

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self) -> str:
        return f"[{self.lo:.17g}, {self.hi:.17g}]"


def _coerce(x) -> Interval:
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, float)):
        return Interval.point(x)
    if isinstance(x, Fraction):
        return Interval.from_fraction(x)
    raise TypeError(f"cannot use {type(x).__name__} as an Interval")


ZERO = Interval(0.0, 0.0)
ONE = Interval(1.0, 1.0)
PI = Interval(_fp.PI_LO, _fp.PI_HI)
HALF_PI = Interval(0.5 * _fp.PI_LO, 0.5 * _fp.PI_HI)
TWO_PI = Interval(2.0 * _fp.PI_LO, 2.0 * _fp.PI_HI)
UNIT = Interval(-1.0, 1.0)
NONNEG = Interval(0.0, math.inf)


def arith(a: Interval, b: Interval, op: str) -> Interval:
    """Apply ``op`` in {"add", "sub", "mul", "div"}."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def hull(a: Interval, b: Interval) -> Interval:
    return Interval(min(a.lo, b.lo), max(a.hi, b.hi))


def contains(a: Interval, x) -> bool:
    return a.contains(x)


def is_nonneg(a: Interval) -> bool:
    return a.lo >= 0.0


def abs_iv(a: Interval) -> Interval:
    if a.lo >= 0.0:
        return a
    if a.hi <= 0.0:
        return -a
    return Interval(0.0, max(-a.lo, a.hi))


def imin(a: Interval, b: Interval) -> Interval:
    """Enclosure of min(x, y) for x in a, y in b."""
    return Interval(min(a.lo, b.lo), min(a.hi, b.hi))


def imax(a: Interval, b: Interval) -> Interval:
    return Interval(max(a.lo, b.lo), max(a.hi, b.hi))


def sqrt_iv(a: Interval) -> Interval:
    """Square root; the negative part of ``a`` is clipped away."""
    if a.hi < 0.0:
        raise IntervalDomainError(f"sqrt of negative interval {a}")
    return Interval(_fp.sqrt_dn(max(a.lo, 0.0)), _fp.sqrt_up(a.hi))


def acos_iv(a: Interval) -> Interval:
    """arccos over ``a`` intersected with [-1, 1]."""
    lo, hi = max(a.lo, -1.0), min(a.hi, 1.0)
    if lo > hi:
        raise IntervalDomainError(f"acos of {a} outside [-1, 1]")
    return Interval(_fp.acos_dn(hi), _fp.acos_up(lo))


def asin_iv(a: Interval) -> Interval:
    """arcsin via pi/2 - arccos."""
    return HALF_PI - acos_iv(a)
