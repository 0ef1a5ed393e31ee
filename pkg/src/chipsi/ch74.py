"""Clauser-Horne six-number function and the value set it bounds.

For any x1, x2 in [0, X] and y1, y2 in [0, Y]::

    f = x1*y1 - x1*y2 + x2*y1 + x2*y2 - Y*x2 - X*y1   lies in [-X*Y, 0]

``verify_theorem`` checks this on random instances using exact integer
arithmetic on a dyadic grid, plus an explicit pass over the 16 corners.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real

import numpy as np

from . import _rng
from .interval import Interval

# Sampling grid: every coordinate is k / GRID_DENOMINATOR.  Scaled products of
# two coordinates stay below 2**48, so int64 sums of six terms are exact.
GRID_BITS = 24
GRID_DENOMINATOR = 1 << GRID_BITS
CHUNK = 1 << 16


class CH74InvariantError(ValueError):
    """An instance violates 0 <= x_n <= X or 0 <= y_n <= Y."""


def _real(value, name):
    if isinstance(value, complex) or not isinstance(value, Real) or isinstance(value, bool):
        raise TypeError(f"{name} must be a real number, got {value!r}")
    return value


@dataclass(frozen=True)
class CH74Instance:
    x1: Real
    x2: Real
    y1: Real
    y2: Real
    X: Real
    Y: Real

    def __post_init__(self):
        for name in ("x1", "x2", "y1", "y2", "X", "Y"):
            _real(getattr(self, name), name)
        for name in ("x1", "x2"):
            v = getattr(self, name)
            if not 0 <= v <= self.X:
                raise CH74InvariantError(f"need 0 <= {name} <= X, got {name}={v}, X={self.X}")
        for name in ("y1", "y2"):
            v = getattr(self, name)
            if not 0 <= v <= self.Y:
                raise CH74InvariantError(f"need 0 <= {name} <= Y, got {name}={v}, Y={self.Y}")

    def scaled(self, s, t) -> CH74Instance:
        return CH74Instance(self.x1 * s, self.x2 * s, self.y1 * t, self.y2 * t, self.X * s, self.Y * t)


@dataclass(frozen=True)
class ChiSpec:
    X: Real
    Y: Real

    def __post_init__(self):
        _real(self.X, "X")
        _real(self.Y, "Y")
        if not (self.X > 0 and self.Y > 0):
            raise ValueError(f"ChiSpec needs X > 0 and Y > 0, got X={self.X}, Y={self.Y}")

    @property
    def window(self) -> Interval:
        return Interval(-self.X * self.Y, 0)


@dataclass(frozen=True)
class BoundsVerdict:
    f: Real
    lower: Real
    upper: Real
    residual_lower: Real
    residual_upper: Real
    holds: bool


@dataclass
class TheoremReport:
    trials: int
    seed: int
    violations: int
    min_f: Fraction
    max_f: Fraction
    corners: list[tuple[tuple[int, int, int, int], Fraction]] = field(repr=False)
    corner_min: Fraction
    corner_max: Fraction
    lower_attained: bool
    upper_attained: bool
    generator: str = _rng.GENERATOR_NAME
    grid_denominator: int = GRID_DENOMINATOR


def _f(x1, x2, y1, y2, X, Y):
    return x1 * y1 - x1 * y2 + x2 * y1 + x2 * y2 - Y * x2 - X * y1


def f_value(inst: CH74Instance) -> Real:
    return _f(inst.x1, inst.x2, inst.y1, inst.y2, inst.X, inst.Y)


def check_bounds(inst: CH74Instance) -> BoundsVerdict:
    f = f_value(inst)
    lower = -inst.X * inst.Y
    return BoundsVerdict(
        f=f,
        lower=lower,
        upper=0,
        residual_lower=f - lower,
        residual_upper=-f,
        holds=Interval(lower, 0).contains(f),
    )


def chi_contains(spec: ChiSpec, v) -> bool:
    return spec.window.contains(_real(v, "v"))


def corner_values(X=1, Y=1) -> list[tuple[tuple[int, int, int, int], Real]]:
    """f at the 16 corners x_n in {0, X}, y_n in {0, Y}; keys are 0/1 flags."""
    out = []
    for flags in itertools.product((0, 1), repeat=4):
        a1, a2, b1, b2 = flags
        out.append((flags, _f(a1 * X, a2 * X, b1 * Y, b2 * Y, X, Y)))
    return out


def draw_scaled(rng: np.random.Generator, n: int, fixed_xy: bool = False):
    """Integer instances on the 1/GRID_DENOMINATOR grid.

    Returns int64 arrays (x1, x2, y1, y2, X, Y); the real instance is each
    array divided by GRID_DENOMINATOR.  With ``fixed_xy`` X = Y = 1.
    """
    D = GRID_DENOMINATOR
    if fixed_xy:
        X = np.full(n, D, dtype=np.int64)
        Y = np.full(n, D, dtype=np.int64)
    else:
        X = rng.integers(1, D, size=n, endpoint=True, dtype=np.int64)
        Y = rng.integers(1, D, size=n, endpoint=True, dtype=np.int64)
    x1 = rng.integers(0, X, endpoint=True, dtype=np.int64)
    x2 = rng.integers(0, X, endpoint=True, dtype=np.int64)
    y1 = rng.integers(0, Y, endpoint=True, dtype=np.int64)
    y2 = rng.integers(0, Y, endpoint=True, dtype=np.int64)
    return x1, x2, y1, y2, X, Y


def chunk_sizes(trials: int):
    full, rest = divmod(trials, CHUNK)
    yield from ((k, CHUNK) for k in range(full))
    if rest:
        yield full, rest


def verify_theorem(trials: int, seed: int) -> TheoremReport:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seed = _rng.check_seed(seed)
    violations = 0
    lo = hi = None
    for k, n in chunk_sizes(trials):
        rng = _rng.generator(seed, f"ch74:{k}")
        x1, x2, y1, y2, X, Y = draw_scaled(rng, n)
        f = _f(x1, x2, y1, y2, X, Y)
        violations += int(np.count_nonzero((f < -X * Y) | (f > 0)))
        cmin, cmax = int(f.min()), int(f.max())
        lo = cmin if lo is None else min(lo, cmin)
        hi = cmax if hi is None else max(hi, cmax)

    corners = corner_values(1, 1)
    values = [v for _, v in corners]
    scale = GRID_DENOMINATOR**2
    return TheoremReport(
        trials=trials,
        seed=seed,
        violations=violations,
        min_f=Fraction(lo, scale),
        max_f=Fraction(hi, scale),
        corners=[(flags, Fraction(v)) for flags, v in corners],
        corner_min=Fraction(min(values)),
        corner_max=Fraction(max(values)),
        lower_attained=min(values) == -1,
        upper_attained=max(values) == 0,
    )
