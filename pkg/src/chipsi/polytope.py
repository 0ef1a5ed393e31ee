"""Correlation polytopes: vertices, LP membership, facets.

A scenario has ``n`` events and a list of pairs.  A point is the vector of
single probabilities followed by the pair joints.  Vertices are the 0/1
vectors produced by truth assignments; exclusions drop assignments that set
both events of an excluded pair.  Events are indexed from 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational, Real

from .lp import phase_one

MAX_EVENTS = 16
FLOAT_TOL = Fraction(1, 10**9)


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    n: int
    pairs: tuple[tuple[int, int], ...] = ()
    exclusions: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        object.__setattr__(self, "exclusions", tuple(tuple(p) for p in self.exclusions))
        if not 1 <= self.n <= MAX_EVENTS:
            raise ScenarioError(f"n must be in [1, {MAX_EVENTS}], got {self.n}")
        for kind, items in (("pair", self.pairs), ("exclusion", self.exclusions)):
            if len(set(items)) != len(items):
                raise ScenarioError(f"duplicate {kind}")
            for i, j in items:
                if not 0 <= i < j < self.n:
                    raise ScenarioError(f"{kind} {(i, j)} needs 0 <= i < j < n")

    @property
    def dim(self) -> int:
        return self.n + len(self.pairs)

    def labels(self) -> list[str]:
        return [f"p{i + 1}" for i in range(self.n)] + [f"p{i + 1}{j + 1}" for i, j in self.pairs]

    def relabeled(self, perm: list[int]) -> Scenario:
        """Event i becomes perm[i]; pair order is preserved."""
        def fix(pair):
            i, j = perm[pair[0]], perm[pair[1]]
            return (min(i, j), max(i, j))
        return Scenario(self.n, tuple(fix(p) for p in self.pairs), tuple(fix(p) for p in self.exclusions))


# events a1, a2, b1, b2 -> 0, 1, 2, 3
CH_SCENARIO = Scenario(4, ((0, 2), (0, 3), (1, 2), (1, 3)))
PAIR_SCENARIO = Scenario(2, ((0, 1),))
EXCLUSIVE_SCENARIO = Scenario(2, (), ((0, 1),))


def _check_prob(value):
    if isinstance(value, bool) or not isinstance(value, Real):
        raise TypeError(f"probability must be real, got {value!r}")
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError("probability must be finite")
    if not 0 <= value <= 1:
        raise ValueError(f"probability {value} outside [0, 1]")
    return value if isinstance(value, Rational) else float(value)


@dataclass(frozen=True)
class CorrelationVector:
    singles: tuple
    joints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "singles", tuple(_check_prob(v) for v in self.singles))
        object.__setattr__(self, "joints", tuple(_check_prob(v) for v in self.joints))

    @classmethod
    def from_flat(cls, scenario: Scenario, values) -> CorrelationVector:
        values = list(values)
        if len(values) != scenario.dim:
            raise ScenarioError(f"expected {scenario.dim} entries, got {len(values)}")
        return cls(tuple(values[: scenario.n]), tuple(values[scenario.n:]))

    def flat(self) -> tuple:
        return self.singles + self.joints

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Rational) for v in self.flat())

    def check(self, scenario: Scenario) -> None:
        if len(self.singles) != scenario.n or len(self.joints) != len(scenario.pairs):
            raise ScenarioError(
                f"vector shape ({len(self.singles)}, {len(self.joints)}) does not match "
                f"scenario ({scenario.n}, {len(scenario.pairs)})"
            )

    def relabeled(self, scenario: Scenario, perm: list[int]) -> CorrelationVector:
        singles = [None] * scenario.n
        for i, v in enumerate(self.singles):
            singles[perm[i]] = v
        return CorrelationVector(tuple(singles), self.joints)


@dataclass(frozen=True)
class VertexSet:
    scenario: Scenario
    vertices: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)


def enumerate_vertices(s: Scenario) -> VertexSet:
    seen, out = set(), []
    for k in range(1 << s.n):
        t = [(k >> i) & 1 for i in range(s.n)]
        if any(t[i] and t[j] for i, j in s.exclusions):
            continue
        v = tuple(t) + tuple(t[i] * t[j] for i, j in s.pairs)
        if v not in seen:
            seen.add(v)
            out.append(v)
    return VertexSet(s, tuple(out))


@dataclass
class MembershipVerdict:
    """Outcome of the convex-hull feasibility problem.

    ``witness`` holds convex weights over ``vertices`` when inside.  When
    outside, ``certificate`` is ``(h, h0)`` with ``h.v + h0 <= 0`` on every
    vertex and ``h.p + h0 > 0``.  ``infeasibility`` is the minimal total
    constraint residual; in float mode a point within ``FLOAT_TOL`` of the
    hull counts as inside.
    """

    inside: bool
    exact: bool
    infeasibility: Fraction
    witness: dict[tuple[int, ...], Fraction] | None = None
    certificate: tuple[tuple[Fraction, ...], Fraction] | None = None
    vertices: tuple[tuple[int, ...], ...] = field(default=(), repr=False)

    @property
    def verdict(self) -> str:
        return "Inside" if self.inside else "Outside"


def membership(s: Scenario, p: CorrelationVector, vertices: VertexSet | None = None) -> MembershipVerdict:
    p.check(s)
    verts = (vertices or enumerate_vertices(s)).vertices
    target = [Fraction(v) for v in p.flat()]  # exact even for floats
    A = [[Fraction(v[r]) for v in verts] for r in range(s.dim)]
    A.append([Fraction(1)] * len(verts))
    b = target + [Fraction(1)]
    res = phase_one(A, b)
    exact = p.exact
    inside = res.feasible or (not exact and res.infeasibility <= FLOAT_TOL)
    if inside:
        witness = {v: w for v, w in zip(verts, res.x) if w}
        return MembershipVerdict(True, exact, res.infeasibility, witness=witness, vertices=verts)
    y = res.farkas
    cert = (tuple(y[:-1]), y[-1])
    return MembershipVerdict(False, exact, res.infeasibility, certificate=cert, vertices=verts)


# -- inequalities -----------------------------------------------------------


@dataclass(frozen=True)
class Inequality:
    """``constant + coeffs . p >= 0``; the left side is the residual."""

    coeffs: tuple[Fraction, ...]
    constant: Fraction = Fraction(0)
    label: str = ""

    def residual(self, p) -> Real:
        values = p.flat() if isinstance(p, CorrelationVector) else tuple(p)
        return self.constant + sum(c * v for c, v in zip(self.coeffs, values) if c)

    def key(self) -> tuple:
        return (self.coeffs, self.constant)

    def render(self, names: list[str]) -> str:
        def expr(coeffs):
            parts = []
            for c, name in zip(coeffs, names):
                if not c:
                    continue
                mag = "" if abs(c) == 1 else f"{abs(c)}*"
                parts.append(("- " if c < 0 else "+ ") + mag + name)
            text = " ".join(parts) or "0"
            return text[2:] if text.startswith("+ ") else "-" + text[2:]

        if self.constant == 0:
            return f"{expr(self.coeffs)} >= 0"
        if self.constant > 0 and all(c <= 0 for c in self.coeffs):
            return f"{expr(tuple(-c for c in self.coeffs))} <= {self.constant}"
        if all(c >= 0 for c in self.coeffs) and self.constant < 0:
            return f"{expr(self.coeffs)} >= {-self.constant}"
        return f"{expr(self.coeffs)} + {self.constant} >= 0"


def _primitive(values: list[Fraction]) -> tuple[int, ...]:
    lcm = 1
    for v in values:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    ints = [int(v * lcm) for v in values]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return tuple(v // g for v in ints) if g else tuple(ints)


def _reduce(basis: list[tuple[int, list[Fraction]]], row: list[Fraction]) -> tuple[int, list[Fraction]] | None:
    """Reduce ``row`` against an echelon basis; None if it is dependent."""
    row = list(row)
    for c, b in basis:
        f = row[c]
        if f:
            row = [a - f * x for a, x in zip(row, b)]
    c = next((k for k, v in enumerate(row) if v), None)
    if c is None:
        return None
    inv = 1 / row[c]
    return c, [v * inv for v in row]


def _normal(basis: list[tuple[int, list[Fraction]]], width: int) -> list[Fraction]:
    """The null vector of a rank ``width - 1`` echelon basis."""
    # back-substitute into reduced echelon form
    rows = sorted(basis, key=lambda t: t[0])
    for k in range(len(rows) - 1, -1, -1):
        c, r = rows[k]
        for i in range(k):
            ci, ri = rows[i]
            f = ri[c]
            if f:
                rows[i] = (ci, [a - f * x for a, x in zip(ri, r)])
    pivots = {c for c, _ in rows}
    free = next(c for c in range(width) if c not in pivots)
    vec = [Fraction(0)] * width
    vec[free] = Fraction(1)
    for c, r in rows:
        vec[c] = -r[free]
    return vec


def affine_rank(points) -> int:
    rows = [[Fraction(1), *map(Fraction, p)] for p in points]
    width = len(rows[0])
    M, rank = rows, 0
    for c in range(width):
        k = next((i for i in range(rank, len(M)) if M[i][c]), None)
        if k is None:
            continue
        M[rank], M[k] = M[k], M[rank]
        for i in range(rank + 1, len(M)):
            if M[i][c]:
                f = M[i][c] / M[rank][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank - 1


def facets(points, names: list[str] | None = None) -> list[Inequality]:
    """Facet inequalities of a full-dimensional polytope given by its vertices.

    Brute force over affinely independent d-subsets of vertices; exact
    rational arithmetic.  Only meant for desk-scale hulls (C(V, d) subsets).
    """
    pts = [tuple(Fraction(x) for x in p) for p in points]
    d = len(pts[0])
    if affine_rank(pts) != d:
        raise ValueError("polytope is not full-dimensional")
    homog = [[Fraction(1), *p] for p in pts]
    found: dict[tuple, Inequality] = {}

    def extend(start, basis):
        if len(basis) == d:
            h = _primitive(_normal(basis, d + 1))
            vals = [sum(a * b for a, b in zip(h, row) if a) for row in homog]
            if all(v >= 0 for v in vals):
                ints = h
            elif all(v <= 0 for v in vals):
                ints = tuple(-v for v in h)
            else:
                return
            ineq = Inequality(tuple(Fraction(c) for c in ints[1:]), Fraction(ints[0]))
            found.setdefault(ineq.key(), ineq)
            return
        for k in range(start, len(homog) - (d - len(basis)) + 1):
            reduced = _reduce(basis, homog[k])
            if reduced is not None:
                extend(k + 1, basis + [reduced])

    extend(0, [])
    out = sorted(found.values(), key=lambda q: (q.constant, tuple(-c for c in q.coeffs)))
    if names:
        out = [Inequality(q.coeffs, q.constant, q.render(names)) for q in out]
    return out


def boole_conditions_n2(p: CorrelationVector) -> list[tuple[str, Real]]:
    """Residuals of the four Boole conditions for two events and their joint."""
    if len(p.singles) != 2 or len(p.joints) != 1:
        raise ScenarioError("expected singles (p1, p2) and joint p12")
    (p1, p2), (p12,) = p.singles, p.joints
    return [
        ("p12 >= 0", p12),
        ("p1 - p12 >= 0", p1 - p12),
        ("p2 - p12 >= 0", p2 - p12),
        ("1 - p1 - p2 + p12 >= 0", 1 - p1 - p2 + p12),
    ]


def _ch_combination(minus_pair: int) -> tuple[Fraction, ...]:
    """Coefficients of S with the minus sign on CH pair ``minus_pair``."""
    i, j = CH_SCENARIO.pairs[minus_pair]
    coeffs = [Fraction(0)] * CH_SCENARIO.dim
    for k in range(4):
        coeffs[4 + k] = Fraction(-1 if k == minus_pair else 1)
    other_a = 1 - i  # a-events are 0, 1
    other_b = 5 - j  # b-events are 2, 3
    coeffs[other_a] = Fraction(-1)
    coeffs[other_b] = Fraction(-1)
    return tuple(coeffs)


def ch_facets() -> list[Inequality]:
    """The 24 facets of the CH polytope: 16 pairwise Boole conditions, 8 CH."""
    names = CH_SCENARIO.labels()
    out = []
    for k, (i, j) in enumerate(CH_SCENARIO.pairs):
        base = [Fraction(0)] * CH_SCENARIO.dim
        rows = []
        c = list(base); c[4 + k] = Fraction(1); rows.append((c, 0))
        c = list(base); c[i] = Fraction(1); c[4 + k] = Fraction(-1); rows.append((c, 0))
        c = list(base); c[j] = Fraction(1); c[4 + k] = Fraction(-1); rows.append((c, 0))
        c = list(base); c[i] = c[j] = Fraction(-1); c[4 + k] = Fraction(1); rows.append((c, 1))
        for coeffs, const in rows:
            out.append(Inequality(tuple(coeffs), Fraction(const)))
    for k in range(4):
        s = _ch_combination(k)
        out.append(Inequality(tuple(-c for c in s)))  # S <= 0
        out.append(Inequality(s, Fraction(1)))  # S >= -1
    return [Inequality(q.coeffs, q.constant, q.render(names)) for q in out]


def facet_residuals(p: CorrelationVector, inequalities=None) -> list[tuple[str, Real]]:
    ineqs = ch_facets() if inequalities is None else inequalities
    return [(q.label, q.residual(p)) for q in ineqs]


def ch_facet_value(q: CorrelationVector, scenario: Scenario = CH_SCENARIO) -> Real:
    """S = p(a1b1) - p(a1b2) + p(a2b1) + p(a2b2) - p(a2) - p(b1)."""
    if scenario != CH_SCENARIO:
        raise ScenarioError("CH value needs events (a1, a2, b1, b2) with the four a-b pairs")
    q.check(scenario)
    (_, pa2, pb1, _), (p11, p12, p21, p22) = q.singles, q.joints
    return p11 - p12 + p21 + p22 - pa2 - pb1


def exclusive_pair_facets() -> list[Inequality]:
    """Facets for two mutually exclusive events: p1 >= 0, p2 >= 0, p1 + p2 <= 1."""
    s = EXCLUSIVE_SCENARIO
    return facets(enumerate_vertices(s).vertices, s.labels())
