"""Generalized uncertainty relation and the set built from it.

``z_bound`` is half the modulus of <[A, B]>.  A ``PsiSpec`` is the window
[z_max - Z, z_max]; membership is decided on the shifted value
z - z_max, which must land in [-Z, 0].
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Real

from . import interval
from .interval import Interval
from .quantum import (
    HermitianOperator,
    StateVector,
    commutator,
    expectation,
    expectation_complex,
    spread,
)

HOLDS_ATOL = 1e-9


@dataclass(frozen=True)
class Verdict:
    lhs: float
    rhs: float
    holds: bool
    slack: float


@dataclass(frozen=True)
class PsiSpec:
    z_max: Real
    Z: Real

    def __post_init__(self):
        if isinstance(self.Z, complex) or isinstance(self.z_max, complex):
            raise TypeError("z_max and Z are real; a complex <C> enters only through its modulus")
        if self.Z < 0:
            raise ValueError(f"Z must be >= 0, got {self.Z}")

    @property
    def z_min(self) -> Real:
        return self.z_max - self.Z

    @property
    def window(self) -> Interval:
        return Interval(self.z_min, self.z_max)


def z_bound(c_op, psi: StateVector) -> float:
    """Z = |<psi|C|psi>| / 2 for any square C (Hermitian or not)."""
    return 0.5 * abs(expectation_complex(c_op, psi))


def check_uncertainty(a: HermitianOperator, b: HermitianOperator, psi: StateVector) -> Verdict:
    lhs = spread(a, psi) * spread(b, psi)
    rhs = z_bound(commutator(a, b), psi)
    return Verdict(lhs=lhs, rhs=rhs, holds=lhs >= rhs - HOLDS_ATOL, slack=lhs - rhs)


def psi_f(z, spec: PsiSpec):
    return z - spec.z_max


def psi_contains(spec: PsiSpec, z) -> bool:
    # z itself is unrestricted; only the shifted value is bounded
    return Interval(-spec.Z, 0).contains(psi_f(z, spec))


def spread_interval(op: HermitianOperator, psi: StateVector) -> Interval:
    """<A> +/- spread(A)."""
    mean, s = expectation(op, psi), spread(op, psi)
    return Interval(mean - s, mean + s)


def psi_from_operators(a: HermitianOperator, b: HermitianOperator, psi: StateVector) -> PsiSpec:
    prod = interval.product(spread_interval(a, psi), spread_interval(b, psi))
    return PsiSpec(z_max=prod.hi, Z=z_bound(commutator(a, b), psi))
