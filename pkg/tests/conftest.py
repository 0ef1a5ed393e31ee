import math

import numpy as np
import pytest

from chipsi.quantum import HermitianOperator, StateVector


def random_hermitian(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator((m + m.conj().T) / 2)


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector.normalized(v)


def singlet_up_up(a, b):
    """Independent oracle: <singlet| P_a (x) P_b |singlet> with spin projectors in the x-z plane."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)

    def proj(t):
        return (np.eye(2) + math.sin(t) * sx + math.cos(t) * sz) / 2

    singlet = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
    return float(np.real(singlet.conj() @ np.kron(proj(a), proj(b)) @ singlet))


def brute_force_ch(step, sense="max"):
    """Independent dense 4-D grid search of the singlet CH expression from the oracle formula."""
    grid = np.arange(0.0, 2 * math.pi, step)
    a2, b1, b2 = np.meshgrid(grid, grid, grid, indexing="ij")
    best = None
    for a1 in grid:
        def p(x, y):
            return 0.25 * (1 - np.cos(x - y))
        s = p(a1, b1) - p(a1, b2) + p(a2, b1) + p(a2, b2) - 1.0
        v = s.max() if sense == "max" else s.min()
        best = v if best is None else (max(best, v) if sense == "max" else min(best, v))
    return float(best)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
