import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest

from chipsi import polytope, quantum
from chipsi.lp import phase_one
from chipsi.polytope import (
    CH_SCENARIO,
    EXCLUSIVE_SCENARIO,
    PAIR_SCENARIO,
    CorrelationVector,
    Scenario,
    ScenarioError,
)


def assert_certified(s, p, verdict):
    """Check the verdict's own proof object exactly."""
    verts = polytope.enumerate_vertices(s).vertices
    target = [F(v) for v in p.flat()]
    if verdict.inside:
        lam = verdict.witness
        assert all(w >= 0 for w in lam.values())
        if verdict.exact:
            assert sum(lam.values()) == 1
            for r in range(s.dim):
                assert sum(w * v[r] for v, w in lam.items()) == target[r]
    else:
        h, h0 = verdict.certificate
        assert all(sum(a * b for a, b in zip(h, v)) + h0 <= 0 for v in verts)
        assert sum(a * b for a, b in zip(h, target)) + h0 > 0


# -- scenario and vertices ----------------------------------------------------


def test_enumerate_vertices_examples():
    assert polytope.enumerate_vertices(PAIR_SCENARIO).vertices == ((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 1))
    assert polytope.enumerate_vertices(Scenario(1)).vertices == ((0,), (1,))
    assert set(polytope.enumerate_vertices(EXCLUSIVE_SCENARIO)) == {(0, 0), (1, 0), (0, 1)}


def test_enumerate_vertices_oracle():
    s = Scenario(3, ((0, 1), (1, 2)), ((0, 2),))
    expected = set()
    for t in itertools.product((0, 1), repeat=3):
        if t[0] and t[2]:
            continue
        expected.add(t + (t[0] * t[1], t[1] * t[2]))
    assert set(polytope.enumerate_vertices(s)) == expected


def test_scenario_validation():
    with pytest.raises(ScenarioError):
        Scenario(17)
    with pytest.raises(ScenarioError):
        Scenario(2, ((1, 0),))
    with pytest.raises(ScenarioError):
        Scenario(2, ((0, 1), (0, 1)))
    with pytest.raises(ScenarioError):
        Scenario(2, (), ((0, 2),))


# -- lp -----------------------------------------------------------------------


def test_phase_one_small():
    res = phase_one([[1, 1]], [1])
    assert res.feasible and sum(res.x) == 1
    res = phase_one([[1, 1], [1, 1]], [1, 2])
    assert not res.feasible
    y = res.farkas
    assert all(y[0] * 1 + y[1] * 1 <= 0 for _ in range(2))
    assert y[0] + 2 * y[1] > 0


def test_phase_one_negative_rhs_and_redundant_rows():
    res = phase_one([[-1, 0], [-1, 0], [0, 1]], [-2, -2, 3])
    assert res.feasible and res.x == [2, 3]


# -- membership ---------------------------------------------------------------


def test_membership_examples():
    p = CorrelationVector((F(1, 2), F(1, 2)), (F(1, 4),))
    v = polytope.membership(PAIR_SCENARIO, p)
    assert v.inside and v.exact
    assert_certified(PAIR_SCENARIO, p, v)
    uniform = {vert: F(1, 4) for vert in polytope.enumerate_vertices(PAIR_SCENARIO)}
    assert sum(w * vert[2] for vert, w in uniform.items()) == F(1, 4)  # the stated witness also works

    p = CorrelationVector((F(1, 2), F(2, 5)), (F(9, 20),))
    v = polytope.membership(PAIR_SCENARIO, p)
    assert not v.inside
    assert_certified(PAIR_SCENARIO, p, v)

    p = CorrelationVector((1, 1), (1,))
    v = polytope.membership(PAIR_SCENARIO, p)
    assert v.inside and v.witness == {(1, 1, 1): 1}


def test_membership_dimension_mismatch():
    with pytest.raises(ScenarioError):
        polytope.membership(PAIR_SCENARIO, CorrelationVector((F(1, 2),), ()))


def test_boole_conditions_examples():
    res = dict(polytope.boole_conditions_n2(CorrelationVector((F(1, 2), F(1, 2)), (F(1, 4),))))
    assert all(r >= 0 for r in res.values())
    res = dict(polytope.boole_conditions_n2(CorrelationVector((F(1, 2), F(2, 5)), (F(9, 20),))))
    assert res["p2 - p12 >= 0"] == F(-1, 20)
    res = polytope.boole_conditions_n2(CorrelationVector((0, 0), (0,)))
    assert all(r >= 0 for _, r in res)


def random_rational_vector(rng, dim, denom=12):
    return [F(int(k), denom) for k in rng.integers(0, denom, size=dim, endpoint=True)]


def test_pair_oracle_equivalence_with_certificates():
    rng = np.random.default_rng(99)
    inside = 0
    for _ in range(2000):
        p = CorrelationVector.from_flat(PAIR_SCENARIO, random_rational_vector(rng, 3))
        v = polytope.membership(PAIR_SCENARIO, p)
        boole = all(r >= 0 for _, r in polytope.boole_conditions_n2(p))
        assert v.inside == boole
        assert_certified(PAIR_SCENARIO, p, v)
        inside += v.inside
    assert 0 < inside < 2000


@pytest.mark.parametrize(
    "p, expected",
    [((F(1, 2),) * 4 + (F(1, 4),) * 4, F(-1, 2)), ((1,) * 8, 0)],
)
def test_ch_facet_value_examples(p, expected):
    q = CorrelationVector.from_flat(CH_SCENARIO, p)
    assert polytope.ch_facet_value(q) == expected
    assert polytope.membership(CH_SCENARIO, q).inside


def test_ch_facet_value_shape():
    with pytest.raises(ScenarioError):
        polytope.ch_facet_value(CorrelationVector((0, 0), (0,)), PAIR_SCENARIO)


def test_quantum_vector_outside():
    angles, value = quantum.maximize_ch(math.pi / 360, 50)
    q = quantum.ch_vector(angles)
    assert polytope.ch_facet_value(q) == pytest.approx(0.2071, abs=1e-4)
    v = polytope.membership(CH_SCENARIO, q)
    assert not v.inside and not v.exact
    assert_certified(CH_SCENARIO, q, v)


def test_exclusive_pair_facets():
    facets = polytope.exclusive_pair_facets()
    assert sorted(q.label for q in facets) == sorted(["p1 >= 0", "p2 >= 0", "p1 + p2 <= 1"])
    assert {q.key() for q in facets} == {
        ((F(1), F(0)), F(0)),
        ((F(0), F(1)), F(0)),
        ((F(-1), F(-1)), F(1)),
    }
    v = polytope.membership(EXCLUSIVE_SCENARIO, CorrelationVector((F(3, 5), F(3, 10))))
    assert v.inside and v.witness == {(0, 0): F(1, 10), (1, 0): F(3, 5), (0, 1): F(3, 10)}
    assert not polytope.membership(EXCLUSIVE_SCENARIO, CorrelationVector((F(7, 10), F(7, 10)))).inside


def test_ch_facets_by_double_description():
    computed = polytope.facets(polytope.enumerate_vertices(CH_SCENARIO).vertices)
    assert len(computed) == 24
    assert {q.key() for q in computed} == {q.key() for q in polytope.ch_facets()}


def test_facets_of_pair_polytope_are_boole_conditions():
    computed = {q.key() for q in polytope.facets(polytope.enumerate_vertices(PAIR_SCENARIO).vertices)}
    expected = {
        ((F(0), F(0), F(1)), F(0)),
        ((F(1), F(0), F(-1)), F(0)),
        ((F(0), F(1), F(-1)), F(0)),
        ((F(-1), F(-1), F(1)), F(1)),
    }
    assert computed == expected


def facets_ok(q):
    return all(ineq.residual(q) >= 0 for ineq in polytope.ch_facets())


def test_ch_oracle_equivalence():
    rng = np.random.default_rng(5)
    verts = polytope.enumerate_vertices(CH_SCENARIO)
    inside = 0
    for k in range(10_000):
        if k % 2:
            flat = random_rational_vector(rng, 8, denom=6)
        else:
            # near-hull points: vertex mixtures nudged by a small rational step
            w = rng.integers(0, 4, size=16)
            w[rng.integers(0, 16)] += 1
            mix = [F(int(sum(int(w[i]) * v[r] for i, v in enumerate(verts.vertices))), int(w.sum())) for r in range(8)]
            r = int(rng.integers(0, 8))
            mix[r] = min(F(1), max(F(0), mix[r] + F(int(rng.integers(-1, 2)), 10)))
            flat = mix
        q = CorrelationVector.from_flat(CH_SCENARIO, flat)
        v = polytope.membership(CH_SCENARIO, q, verts)
        assert v.inside == facets_ok(q)
        inside += v.inside
    assert 500 < inside < 9500


def test_every_vertex_and_mixture_inside():
    rng = np.random.default_rng(6)
    verts = polytope.enumerate_vertices(CH_SCENARIO)
    for v in verts:
        q = CorrelationVector.from_flat(CH_SCENARIO, v)
        assert polytope.membership(CH_SCENARIO, q, verts).inside
    for _ in range(1000):
        w = rng.integers(0, 10, size=16) + 1
        lam = [F(int(x), int(w.sum())) for x in w]
        flat = [sum(l * v[r] for l, v in zip(lam, verts.vertices)) for r in range(8)]
        q = CorrelationVector.from_flat(CH_SCENARIO, flat)
        v = polytope.membership(CH_SCENARIO, q, verts)
        assert v.inside
        assert_certified(CH_SCENARIO, q, v)


def test_relabeling_invariance():
    rng = np.random.default_rng(12)
    s = Scenario(4, ((0, 1), (0, 2), (1, 3), (2, 3)))
    for _ in range(200):
        perm = [int(x) for x in rng.permutation(4)]
        flat = random_rational_vector(rng, s.dim, denom=5)
        p = CorrelationVector.from_flat(s, flat)
        s2 = s.relabeled(perm)
        p2 = p.relabeled(s, perm)
        assert polytope.membership(s, p).inside == polytope.membership(s2, p2).inside


def test_ch_symmetry_relabelings():
    # a1<->a2, b1<->b2, and the a/b swap keep the CH pair set fixed
    for perm in ([1, 0, 2, 3], [0, 1, 3, 2], [2, 3, 0, 1]):
        s2 = CH_SCENARIO.relabeled(perm)
        assert set(s2.pairs) == set(CH_SCENARIO.pairs)


def test_float_mode_tolerance():
    # p12 exceeds p2 by 1e-12: outside exactly, inside within float tolerance
    q = CorrelationVector((1.0, 0.0), (1e-12,))
    v = polytope.membership(PAIR_SCENARIO, q)
    assert v.inside and not v.exact and v.infeasibility > 0
    exact = CorrelationVector((F(1), F(0)), (F(1, 10**12),))
    assert not polytope.membership(PAIR_SCENARIO, exact).inside
    q = CorrelationVector((0.5, 0.4), (0.45,))
    assert not polytope.membership(PAIR_SCENARIO, q).inside


def test_inequality_render():
    assert polytope.ch_facets()[0].label == "p13 >= 0"
    labels = {q.label for q in polytope.ch_facets()}
    assert "p2 + p3 - p13 + p14 - p23 - p24 >= 0" in labels


def test_not_full_dimensional():
    s = Scenario(2, ((0, 1),), ((0, 1),))
    with pytest.raises(ValueError):
        polytope.facets(polytope.enumerate_vertices(s).vertices)
