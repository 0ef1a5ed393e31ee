"""Value-range inclusion of the CH74 set in the uncertainty set.

Both sets are compared through their values: [-X*Y, 0] for the CH74 side
and [-Z, 0] for the uncertainty side, so inclusion holds exactly when
Z >= X*Y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real

import numpy as np

from . import _rng, ch74
from .ch74 import ChiSpec
from .interval import FLOAT_ATOL, Interval
from .quantum import HermitianOperator, StateVector, commutator
from .uncertainty import z_bound


class EmptyChiError(ValueError):
    pass


@dataclass(frozen=True)
class InclusionReport:
    chi: ChiSpec
    psi: Interval  # the value window [-Z, 0]
    holds: bool
    witness: Real | None
    samples_checked: int = 0
    escapes: int = 0

    @property
    def Z(self) -> Real:
        return -self.psi.lo


def _exact_sqrt(q: Fraction) -> Fraction | None:
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def decompose(z: Real) -> tuple[Real, Real]:
    """Split Z into X * Y with X close to Y close to sqrt(Z).

    Perfect rational squares give X = Y = sqrt(Z).  Otherwise, for rational
    Z, X is a rational approximation of sqrt(Z) and Y = Z / X, so X * Y == Z
    exactly.
    """
    if isinstance(z, complex):
        raise TypeError("decompose takes the real modulus 1/2 |<C>|")
    if z < 0:
        raise ValueError(f"Z must be >= 0, got {z}")
    if z == 0:
        raise EmptyChiError("empty chi: Z = 0 leaves no X, Y > 0")
    if isinstance(z, Rational):
        z = Fraction(z)
        root = _exact_sqrt(z)
        if root is not None:
            return root, root
        x = Fraction(math.sqrt(z)).limit_denominator(10**12)
        return x, z / x
    x = math.sqrt(z)
    return x, z / x


def _window(z: Real) -> Interval:
    return Interval(-z, 0)


def subset_check(chi: ChiSpec, z: Real) -> InclusionReport:
    """Analytic check of [-XY, 0] within [-Z, 0].

    The witness is the midpoint of the gap between the two lower ends: an
    element of the larger range missing from the smaller one.
    """
    if z < 0:
        raise ValueError(f"Z must be >= 0, got {z}")
    xy = chi.X * chi.Y
    psi = _window(z)
    holds = psi.contains(-xy)
    witness = None
    if z != xy:
        witness = -(xy + z) / 2
        if not isinstance(witness, Rational):
            witness = float(witness)
    return InclusionReport(chi, psi, holds, witness if (not holds or z > xy) else None)


def sampled_subset_check(
    chi: ChiSpec,
    a: HermitianOperator,
    b: HermitianOperator,
    psi: StateVector,
    trials: int,
    seed: int,
) -> InclusionReport:
    """Sample CH74 instances with the given X, Y and test each value against [-Z, 0].

    Instances are drawn on the dyadic grid of :mod:`chipsi.ch74` as
    x_n = X u_n, y_n = Y v_n, so f = X Y f(u, v; 1, 1).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    z = z_bound(commutator(a, b), psi)
    analytic = subset_check(chi, z)
    xy = float(chi.X * chi.Y)
    scale = ch74.GRID_DENOMINATOR**2
    escapes, first = 0, None
    for k, n in ch74.chunk_sizes(trials):
        rng = _rng.generator(seed, f"metaset:{k}")
        u1, u2, v1, v2, one_x, one_y = ch74.draw_scaled(rng, n, fixed_xy=True)
        f = xy * (ch74._f(u1, u2, v1, v2, one_x, one_y) / scale)
        bad = (f < -z - FLOAT_ATOL) | (f > FLOAT_ATOL)
        count = int(np.count_nonzero(bad))
        if count and first is None:
            first = float(f[np.argmax(bad)])
        escapes += count
    holds = analytic.holds and escapes == 0
    witness = first if first is not None else analytic.witness
    return InclusionReport(chi, analytic.psi, holds, witness, samples_checked=trials, escapes=escapes)
