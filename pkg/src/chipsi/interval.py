"""Closed real intervals with Moore products.

Endpoints built from ints or Fractions stay exact; any float endpoint
switches the interval (and everything derived from it) to float mode,
where membership uses an absolute boundary tolerance of ``FLOAT_ATOL``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real

FLOAT_ATOL = 1e-9


class IntervalOrderError(ValueError):
    """Raised when lo > hi."""


def _coerce(value) -> Real:
    if isinstance(value, bool):
        raise TypeError("booleans are not interval endpoints")
    if isinstance(value, Rational):
        return Fraction(value) if not isinstance(value, int) else value
    if isinstance(value, Real):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite endpoint {value!r}")
        return value
    raise TypeError(f"unsupported endpoint type {type(value).__name__}")


def is_exact(*values) -> bool:
    return all(isinstance(v, Rational) for v in values)


@dataclass(frozen=True)
class Interval:
    lo: Real
    hi: Real

    def __post_init__(self):
        lo, hi = _coerce(self.lo), _coerce(self.hi)
        if not is_exact(lo, hi):
            lo, hi = float(lo), float(hi)
        if lo > hi:
            raise IntervalOrderError(f"lo={lo} > hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def exact(self) -> bool:
        return is_exact(self.lo, self.hi)

    @property
    def length(self) -> Real:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        x = _coerce(x)
        if self.exact and is_exact(x):
            return self.lo <= x <= self.hi
        return self.lo - FLOAT_ATOL <= float(x) <= self.hi + FLOAT_ATOL

    def __mul__(self, other: Interval) -> Interval:
        if not isinstance(other, Interval):
            return NotImplemented
        return product(self, other)

    def __contains__(self, x) -> bool:
        return self.contains(x)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def make(lo, hi) -> Interval:
    return Interval(lo, hi)


def product(i: Interval, j: Interval) -> Interval:
    """Moore product: the hull of the four endpoint products."""
    ends = (i.lo * j.lo, i.lo * j.hi, i.hi * j.lo, i.hi * j.hi)
    return Interval(min(ends), max(ends))


def length(i: Interval) -> Real:
    return i.length


def contains(i: Interval, x) -> bool:
    return i.contains(x)
