"""Single-sample versus multi-sample frequency estimation.

A single sample draws whole truth assignments from one joint distribution
and reads every frequency off that one population, so the resulting vector
is a rational convex combination of polytope vertices.  A multi-sample run
estimates each single and each pair joint from its own independent sample,
with no requirement that the marginals come from a common joint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

from . import _rng
from .polytope import (
    CH_SCENARIO,
    PAIR_SCENARIO,
    CorrelationVector,
    MembershipVerdict,
    Scenario,
    boole_conditions_n2,
    ch_facet_value,
    ch_facets,
    membership,
)
from .quantum import (
    HermitianOperator,
    MeasurementAngles,
    StateVector,
    ch_joints,
    commutator,
    SINGLE_MARGINAL,
)

_INT_DRAW_LIMIT = 1 << 62
BAND_SIGMAS = 3.0


class MismatchError(ValueError):
    pass


def _assignment(k: int, n: int) -> tuple[int, ...]:
    return tuple((k >> i) & 1 for i in range(n))


def _index(assignment) -> int:
    return sum(int(bit) << i for i, bit in enumerate(assignment))


class JointDistribution:
    """Exact rational weights over {0, 1}^n assignments (bit i is event i)."""

    def __init__(self, n: int, weights: dict):
        self.n = int(n)
        clean = {}
        for assignment, w in weights.items():
            assignment = tuple(int(b) for b in assignment)
            if len(assignment) != self.n or any(b not in (0, 1) for b in assignment):
                raise ValueError(f"bad assignment {assignment} for n={self.n}")
            w = Fraction(w)
            if w < 0:
                raise ValueError("weights must be nonnegative")
            if w:
                clean[assignment] = clean.get(assignment, Fraction(0)) + w
        if sum(clean.values(), Fraction(0)) != 1:
            raise ValueError("weights must sum to exactly 1")
        self.weights = clean

    @classmethod
    def uniform(cls, n: int) -> JointDistribution:
        w = Fraction(1, 1 << n)
        return cls(n, {_assignment(k, n): w for k in range(1 << n)})

    @classmethod
    def point_mass(cls, assignment) -> JointDistribution:
        return cls(len(assignment), {tuple(assignment): 1})

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, max_weight: int = 20) -> JointDistribution:
        raw = rng.integers(0, max_weight, size=1 << n, endpoint=True)
        if not raw.any():
            raw[rng.integers(0, 1 << n)] = 1
        total = int(raw.sum())
        return cls(n, {_assignment(k, n): Fraction(int(w), total) for k, w in enumerate(raw)})

    def probability(self, event: int) -> Fraction:
        return sum((w for a, w in self.weights.items() if a[event]), Fraction(0))

    def joint_table(self, i: int, j: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        """(P00, P01, P10, P11) for events i and j."""
        t = [Fraction(0)] * 4
        for a, w in self.weights.items():
            t[2 * a[i] + a[j]] += w
        return tuple(t)

    def draw(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """Assignment indices for ``size`` independent draws.

        Sampling is exact: an integer uniform on [0, D) is located in the
        cumulative integer weights, D being the common denominator.
        """
        keys = sorted(self.weights, key=_index)
        denom = math.lcm(*(w.denominator for w in self.weights.values()))
        nums = [int(self.weights[k] * denom) for k in keys]
        idx = np.array([_index(k) for k in keys], dtype=np.int64)
        if denom < _INT_DRAW_LIMIT:
            cum = np.cumsum(np.array(nums, dtype=np.int64))
            u = rng.integers(0, denom, size=size, dtype=np.int64)
            return idx[np.searchsorted(cum, u, side="right")]
        probs = np.array([n / denom for n in nums], dtype=float)
        return idx[rng.choice(len(keys), size=size, p=probs / probs.sum())]


@dataclass(frozen=True)
class FrequencyVector:
    vector: CorrelationVector
    size: int
    seed: int
    generator: str = _rng.GENERATOR_NAME


def _pair_table(pair_probs) -> tuple[float, float, float, float]:
    t = tuple(pair_probs)
    if len(t) != 4 or any(p < 0 for p in t) or abs(sum(float(p) for p in t) - 1.0) > 1e-12:
        raise ValueError(f"pair distribution must be 4 nonnegative numbers summing to 1, got {t}")
    return t


class PairwiseSource:
    """Independent per-component distributions.

    ``singles[i]`` is P(event i); ``pairs[(i, j)]`` is (P00, P01, P10, P11).
    No cross-pair consistency is required.
    """

    def __init__(self, singles: dict[int, Real], pairs: dict[tuple[int, int], tuple]):
        self.singles = {int(i): p for i, p in singles.items()}
        for i, p in self.singles.items():
            if not 0 <= p <= 1:
                raise ValueError(f"P(event {i}) = {p} outside [0, 1]")
        self.pairs = {tuple(k): _pair_table(v) for k, v in pairs.items()}

    @classmethod
    def from_joint(cls, d: JointDistribution, s: Scenario) -> PairwiseSource:
        return cls(
            {i: d.probability(i) for i in range(s.n)},
            {(i, j): d.joint_table(i, j) for i, j in s.pairs},
        )

    @classmethod
    def quantum(cls, angles: MeasurementAngles) -> PairwiseSource:
        """Singlet statistics for the CH scenario at the given angles."""
        pairs = {}
        for pair, p11 in zip(CH_SCENARIO.pairs, ch_joints(angles)):
            anti = SINGLE_MARGINAL - p11
            pairs[pair] = (p11, anti, anti, p11)
        return cls({i: SINGLE_MARGINAL for i in range(4)}, pairs)

    def check(self, s: Scenario) -> None:
        if set(self.singles) != set(range(s.n)) or set(self.pairs) != set(s.pairs):
            raise MismatchError("source components do not match the scenario")


def single_sample_run(
    d: JointDistribution, s: Scenario, size: int, seed: int
) -> tuple[FrequencyVector, MembershipVerdict]:
    if d.n != s.n:
        raise MismatchError(f"distribution has n={d.n}, scenario has n={s.n}")
    if size < 1:
        raise ValueError("size must be >= 1")
    rng = _rng.generator(seed, "single-sample")
    draws = d.draw(size, rng)
    counts = np.bincount(draws, minlength=1 << s.n)
    bits = np.arange(1 << s.n)
    single_counts = [int(counts[(bits >> i) & 1 == 1].sum()) for i in range(s.n)]
    joint_counts = [int(counts[((bits >> i) & (bits >> j) & 1) == 1].sum()) for i, j in s.pairs]
    vec = CorrelationVector(
        tuple(Fraction(c, size) for c in single_counts),
        tuple(Fraction(c, size) for c in joint_counts),
    )
    freq = FrequencyVector(vec, size, _rng.check_seed(seed))
    return freq, membership(s, vec)


@dataclass
class MultiSampleResult:
    frequencies: FrequencyVector
    verdict: MembershipVerdict
    facet_residuals: list[tuple[str, Real]]
    facet_standard_errors: list[float]
    ch_value: Fraction | None = None


def _float(p) -> float:
    return float(p)


def multi_sample_run(src: PairwiseSource, s: Scenario, size_per_pair: int, seed: int) -> MultiSampleResult:
    src.check(s)
    if size_per_pair < 1:
        raise ValueError("size_per_pair must be >= 1")
    singles = []
    for i in range(s.n):
        rng = _rng.generator(seed, f"single:{i}")
        singles.append(Fraction(int(rng.binomial(size_per_pair, _float(src.singles[i]))), size_per_pair))
    joints = []
    for i, j in s.pairs:
        rng = _rng.generator(seed, f"pair:{i}-{j}")
        probs = np.array([_float(p) for p in src.pairs[(i, j)]])
        counts = rng.multinomial(size_per_pair, probs / probs.sum())
        joints.append(Fraction(int(counts[3]), size_per_pair))
    vec = CorrelationVector(tuple(singles), tuple(joints))
    freq = FrequencyVector(vec, size_per_pair, _rng.check_seed(seed))
    verdict = membership(s, vec)

    if s == CH_SCENARIO:
        ineqs = ch_facets()
        residuals = [(q.label, q.residual(vec)) for q in ineqs]
        coeff_rows = [q.coeffs for q in ineqs]
        ch = ch_facet_value(vec)
    elif s == PAIR_SCENARIO:
        residuals = boole_conditions_n2(vec)
        coeff_rows = [(0, 0, 1), (1, 0, -1), (0, 1, -1), (-1, -1, 1)]
        ch = None
    else:
        residuals, coeff_rows, ch = [], [], None
    # each component is an independent binomial estimate
    true_p = [_float(src.singles[i]) for i in range(s.n)] + [_float(src.pairs[p][3]) for p in s.pairs]
    var = [p * (1 - p) / size_per_pair for p in true_p]
    ses = [math.sqrt(sum(float(c) ** 2 * v for c, v in zip(row, var))) for row in coeff_rows]
    return MultiSampleResult(freq, verdict, residuals, ses, ch)


@dataclass(frozen=True)
class SampledUncertaintyVerdict:
    lhs: float
    rhs: float
    standard_error: float
    band: float
    holds: bool
    size: int
    seed: int
    spreads: tuple[float, float]
    generator: str = _rng.GENERATOR_NAME


def _born_sample(op: HermitianOperator | np.ndarray, psi: StateVector, size: int, rng) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and their counts from ``size`` simulated measurements."""
    m = op.matrix if isinstance(op, HermitianOperator) else op
    w, v = np.linalg.eigh(m)
    probs = np.abs(v.conj().T @ psi.amplitudes) ** 2
    counts = rng.multinomial(size, probs / probs.sum())
    return w, counts


def _moments(values: np.ndarray, counts: np.ndarray) -> tuple[float, float, float]:
    n = counts.sum()
    mean = float((values * counts).sum() / n)
    dev = values - mean
    m2 = float((dev**2 * counts).sum() / n)
    m4 = float((dev**4 * counts).sum() / n)
    return mean, m2, m4


def _smoothed(counts: np.ndarray) -> np.ndarray:
    # Jeffreys pseudo-counts, so a sample that saw one outcome still gets a nonzero error
    return counts + 0.5


def _spread_estimate(values, counts) -> tuple[float, float]:
    """Sample standard deviation and its standard error.

    Var(s^2) = (mu4 - sigma^4)/n + 2 sigma^4 / (n (n - 1)); the second term
    keeps the error honest for two-point spectra where mu4 ~ sigma^4.  The
    moments feeding the error come from pseudo-counted frequencies.
    """
    n = int(counts.sum())
    _, m2, _ = _moments(values, counts)
    s = math.sqrt(m2 * n / (n - 1))
    _, m2, m4 = _moments(values, _smoothed(counts))
    s2 = m2 * n / (n - 1)
    var_s2 = max(m4 - s2 * s2, 0.0) / n + 2.0 * s2 * s2 / (n * (n - 1))
    se = math.sqrt(var_s2) / (2.0 * s) if s > 0 else math.sqrt(math.sqrt(var_s2))
    return s, se


def uncertainty_multi_sample(
    a: HermitianOperator, b: HermitianOperator, psi: StateVector, size: int, seed: int
) -> SampledUncertaintyVerdict:
    """Estimate both sides of the uncertainty relation from three independent samples.

    The commutator C is anti-Hermitian; its expectation is read through the
    Hermitian K = -iC, since |<C>| = |<K>|.  The verdict only reports whether
    the estimates sit within a 3-sigma band; it never asserts a violation.
    """
    if size < 2:
        raise ValueError("size must be >= 2")
    c = commutator(a, b)
    k_op = -1j * c
    sa, se_a = _spread_estimate(*_born_sample(a, psi, size, _rng.generator(seed, "spread:a")))
    sb, se_b = _spread_estimate(*_born_sample(b, psi, size, _rng.generator(seed, "spread:b")))
    wk, ck = _born_sample(k_op, psi, size, _rng.generator(seed, "commutator"))
    k_mean, _, _ = _moments(wk, ck)
    _, k_m2, _ = _moments(wk, _smoothed(ck))
    lhs = sa * sb
    rhs = 0.5 * abs(k_mean)
    se_lhs2 = (sb * se_a) ** 2 + (sa * se_b) ** 2
    se_rhs2 = 0.25 * k_m2 * size / (size - 1) / size
    se = math.sqrt(se_lhs2 + se_rhs2)
    band = BAND_SIGMAS * se
    return SampledUncertaintyVerdict(
        lhs=lhs,
        rhs=rhs,
        standard_error=se,
        band=band,
        holds=lhs >= rhs - band,
        size=size,
        seed=_rng.check_seed(seed),
        spreads=(sa, sb),
    )
