"""Dense finite-dimensional quantum machinery and the singlet CH search.

Conventions: hbar = 1, standard Pauli matrices, spin-1/2 singlet with
joint up-up probability (1 - cos(a - b)) / 4 and single marginals 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_DIM = 16
HERMITIAN_ATOL = 1e-12
NORM_ATOL = 1e-12
IMAG_ATOL = 1e-9
RADICAND_ATOL = 1e-12
TWO_PI = 2.0 * math.pi

SINGLE_MARGINAL = 0.5
CH_QUANTUM_MAX = (math.sqrt(2.0) - 1.0) / 2.0
CH_QUANTUM_MIN = -(1.0 + math.sqrt(2.0)) / 2.0


class DimensionError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


class NormalizationError(ValueError):
    pass


def _square(entries) -> np.ndarray:
    m = np.array(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise DimensionError(f"dimension {m.shape[0]} exceeds cap {MAX_DIM}")
    return m


class HermitianOperator:
    __slots__ = ("matrix",)

    def __init__(self, entries):
        m = _square(entries)
        if not np.allclose(m, m.conj().T, rtol=0.0, atol=HERMITIAN_ATOL):
            raise NotHermitianError("operator is not Hermitian within 1e-12")
        m.setflags(write=False)
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other):
        other = other.matrix if isinstance(other, HermitianOperator) else other
        return self.matrix @ other

    def __eq__(self, other):
        return isinstance(other, HermitianOperator) and np.array_equal(self.matrix, other.matrix)

    def __repr__(self):
        return f"HermitianOperator({self.matrix.tolist()!r})"


class StateVector:
    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes):
        v = np.array(amplitudes, dtype=complex)
        if v.ndim != 1 or v.size == 0:
            raise DimensionError(f"expected a non-empty vector, got shape {v.shape}")
        if v.size > MAX_DIM:
            raise DimensionError(f"dimension {v.size} exceeds cap {MAX_DIM}")
        norm2 = float(np.vdot(v, v).real)
        if abs(norm2 - 1.0) > NORM_ATOL:
            raise NormalizationError(f"squared norm {norm2!r} differs from 1")
        v.setflags(write=False)
        self.amplitudes = v

    @classmethod
    def normalized(cls, amplitudes) -> StateVector:
        v = np.array(amplitudes, dtype=complex)
        return cls(v / np.linalg.norm(v))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __repr__(self):
        return f"StateVector({self.amplitudes.tolist()!r})"


SIGMA_X = HermitianOperator([[0, 1], [1, 0]])
SIGMA_Y = HermitianOperator([[0, -1j], [1j, 0]])
SIGMA_Z = HermitianOperator([[1, 0], [0, -1]])
IDENTITY_2 = HermitianOperator(np.eye(2))

PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z, "i": IDENTITY_2}

_S = 1.0 / math.sqrt(2.0)
NAMED_STATES = {
    "+z": (1, 0),
    "-z": (0, 1),
    "+x": (_S, _S),
    "-x": (_S, -_S),
    "+y": (_S, 1j * _S),
    "-y": (_S, -1j * _S),
}


def named_state(name: str) -> StateVector:
    return StateVector.normalized(NAMED_STATES[name])


def _check_dims(*objs):
    dims = {o.dim if hasattr(o, "dim") else o.shape[0] for o in objs}
    if len(dims) != 1:
        raise DimensionError(f"dimension mismatch: {sorted(dims)}")


def expectation_complex(matrix, psi: StateVector) -> complex:
    """<psi|M|psi> for an arbitrary square matrix."""
    m = matrix.matrix if isinstance(matrix, HermitianOperator) else _square(matrix)
    _check_dims(m, psi)
    v = psi.amplitudes
    return complex(np.vdot(v, m @ v))


def expectation(op: HermitianOperator, psi: StateVector) -> float:
    if not isinstance(op, HermitianOperator):
        op = HermitianOperator(op)
    value = expectation_complex(op, psi)
    if abs(value.imag) >= IMAG_ATOL:
        raise NotHermitianError(f"expectation has imaginary residue {value.imag!r}")
    return value.real


def spread(op: HermitianOperator, psi: StateVector) -> float:
    """Standard deviation sqrt(<A^2> - <A>^2)."""
    mean = expectation(op, psi)
    second = expectation(HermitianOperator(op.matrix @ op.matrix), psi)
    radicand = second - mean * mean
    if radicand < -RADICAND_ATOL:
        raise ArithmeticError(f"negative variance {radicand!r}")
    return math.sqrt(max(radicand, 0.0))


def commutator(a: HermitianOperator, b: HermitianOperator) -> np.ndarray:
    _check_dims(a, b)
    return a.matrix @ b.matrix - b.matrix @ a.matrix


def singlet_joint_prob(theta: float) -> float:
    """P(up, up) for singlet spins measured along axes `theta` apart."""
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    return 0.25 * (1.0 - math.cos(theta))


@dataclass(frozen=True)
class MeasurementAngles:
    a1: float
    a2: float
    b1: float
    b2: float

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            v = math.fmod(v, TWO_PI)
            if v < 0:
                v += TWO_PI
            if v >= TWO_PI:
                v = 0.0
            object.__setattr__(self, name, v)

    def astuple(self) -> tuple[float, float, float, float]:
        return (self.a1, self.a2, self.b1, self.b2)


def ch_joints(angles: MeasurementAngles) -> tuple[float, float, float, float]:
    """Joint probabilities in CH pair order (a1b1, a1b2, a2b1, a2b2)."""
    a1, a2, b1, b2 = angles.astuple()
    return (
        singlet_joint_prob(a1 - b1),
        singlet_joint_prob(a1 - b2),
        singlet_joint_prob(a2 - b1),
        singlet_joint_prob(a2 - b2),
    )


def ch_value(angles: MeasurementAngles) -> float:
    p11, p12, p21, p22 = ch_joints(angles)
    return p11 - p12 + p21 + p22 - SINGLE_MARGINAL - SINGLE_MARGINAL


def ch_vector(angles: MeasurementAngles):
    """The singlet correlation vector for the CH scenario (events a1, a2, b1, b2)."""
    from .polytope import CorrelationVector

    return CorrelationVector((SINGLE_MARGINAL,) * 4, ch_joints(angles))


def grid_search_ch(grid_step: float, sense: str = "max") -> tuple[MeasurementAngles, float]:
    """Exhaustive search of ch_value over a grid on the 4-torus.

    ch_value depends only on angle differences, so a1 is pinned to 0 without
    loss.  For fixed a2 the b1 and b2 terms separate, which makes the full grid
    search O(N^2) instead of O(N^3).  Ties resolve to the lexicographically
    smallest (a2, b1, b2) grid point.
    """
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    if not grid_step > 0:
        raise ValueError("grid_step must be positive")
    grid = np.arange(0.0, TWO_PI, grid_step)
    # S = -1/2 - (c11 - c12 + c21 + c22) / 4 with a1 = 0
    diff = np.cos(grid[:, None] - grid[None, :])  # [a2, b]
    g = np.cos(grid)[None, :] + diff  # b1 terms
    h = -np.cos(grid)[None, :] + diff  # b2 terms
    sign = 1.0 if sense == "max" else -1.0
    # maximizing S means minimizing sign * (g + h)
    g, h = sign * g, sign * h
    ib1 = _first_argmin(g)
    ib2 = _first_argmin(h)
    rows = np.arange(grid.size)
    total = g[rows, ib1] + h[rows, ib2]
    ia2 = int(_first_argmin(total[None, :])[0])
    angles = MeasurementAngles(0.0, grid[ia2], grid[ib1[ia2]], grid[ib2[ia2]])
    return angles, ch_value(angles)


def _first_argmin(values: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    best = values.min(axis=1, keepdims=True)
    return np.argmax(values <= best + atol, axis=1)


def _refine(angles: MeasurementAngles, iters: int, sense: str) -> tuple[MeasurementAngles, float]:
    """Exact coordinate ascent.

    Along any single angle, ch_value is c + p*cos(t) + q*sin(t); three
    evaluations recover (c, p, q) and the optimum along that axis is
    closed-form.
    """
    sign = 1.0 if sense == "max" else -1.0
    current = list(angles.astuple())
    best = sign * ch_value(MeasurementAngles(*current))
    for _ in range(iters):
        improved = False
        for k in range(4):
            probe = []
            for t in (0.0, 0.5 * math.pi, math.pi):
                trial = current.copy()
                trial[k] = t
                probe.append(sign * ch_value(MeasurementAngles(*trial)))
            c = 0.5 * (probe[0] + probe[2])
            p = 0.5 * (probe[0] - probe[2])
            q = probe[1] - c
            trial = current.copy()
            trial[k] = math.atan2(q, p)
            value = sign * ch_value(MeasurementAngles(*trial))
            if value > best + 1e-15:
                current, best = trial, value
                improved = True
        if not improved:
            break
    result = MeasurementAngles(*current)
    return result, ch_value(result)


def maximize_ch(grid_step: float, refine_iters: int, sense: str = "max") -> tuple[MeasurementAngles, float]:
    """Grid search plus coordinate refinement of the singlet CH expression.

    ``sense="min"`` gives the minimizing variant.  The maximizer is not
    unique; only the value is meaningful.
    """
    if grid_step > math.pi / 36 + 1e-15:
        raise ValueError("grid_step must be <= pi/36")
    if refine_iters < 0:
        raise ValueError("refine_iters must be >= 0")
    angles, _ = grid_search_ch(grid_step, sense)
    return _refine(angles, refine_iters, sense)
