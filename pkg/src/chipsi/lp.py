"""Phase-one simplex over exact rationals.

Decides feasibility of ``A x = b, x >= 0`` with Bland's rule (no cycling).
On infeasibility the final tableau yields a Farkas certificate ``y`` with
``y @ A <= 0`` columnwise and ``y @ b > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass
class PhaseOneResult:
    infeasibility: Fraction  # optimal sum of artificials; 0 iff feasible
    x: list[Fraction]
    farkas: list[Fraction]
    pivots: int

    @property
    def feasible(self) -> bool:
        return self.infeasibility == 0


def phase_one(A: list[list], b: list) -> PhaseOneResult:
    m = len(A)
    n = len(A[0]) if m else 0
    if len(b) != m or any(len(row) != n for row in A):
        raise ValueError("inconsistent LP shape")
    signs = [1 if Fraction(bi) >= 0 else -1 for bi in b]
    width = n + m + 1
    rhs = n + m
    T = []
    for i in range(m):
        s = signs[i]
        row = [Fraction(s * v) for v in A[i]] + [Fraction(0)] * m + [Fraction(s * b[i])]
        row[n + i] = Fraction(1)
        T.append(row)
    # reduced costs for min sum(artificials); last entry holds -objective
    cost = [Fraction(0)] * width
    for i in range(m):
        for j in range(n):
            cost[j] -= T[i][j]
        cost[rhs] -= T[i][rhs]
    basis = list(range(n, n + m))

    pivots = 0
    while True:
        enter = next((j for j in range(n + m) if cost[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][rhs] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:  # unbounded direction; impossible for phase one
            raise ArithmeticError("phase-one objective unbounded")
        _pivot(T, cost, leave, enter)
        basis[leave] = enter
        pivots += 1

    x = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            x[var] = T[i][rhs]
    # artificial column i has cost 1, so its reduced cost is 1 - y_i
    farkas = [signs[i] * (1 - cost[n + i]) for i in range(m)]
    return PhaseOneResult(infeasibility=-cost[rhs], x=x, farkas=farkas, pivots=pivots)


def _pivot(T, cost, r, c):
    prow = T[r]
    piv = prow[c]
    if piv != 1:
        prow[:] = [v / piv for v in prow]
    for row in (*T, cost):
        if row is prow:
            continue
        f = row[c]
        if f:
            for j, v in enumerate(prow):
                if v:
                    row[j] -= f * v
