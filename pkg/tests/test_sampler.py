import math
from fractions import Fraction as F

import numpy as np
import pytest

from chipsi import _rng, polytope, quantum, sampler
from chipsi.polytope import CH_SCENARIO, PAIR_SCENARIO
from chipsi.quantum import SIGMA_X, SIGMA_Y, StateVector
from chipsi.sampler import JointDistribution, PairwiseSource

UP = StateVector([1, 0])


@pytest.fixture(scope="module")
def optimal_angles():
    angles, _ = quantum.maximize_ch(math.pi / 360, 50)
    return angles


def test_joint_distribution_validation():
    with pytest.raises(ValueError):
        JointDistribution(2, {(0, 0): F(1, 2)})
    with pytest.raises(ValueError):
        JointDistribution(2, {(0, 0): F(3, 2), (1, 1): F(-1, 2)})
    d = JointDistribution.uniform(3)
    assert sum(d.weights.values()) == 1 and d.probability(0) == F(1, 2)


def test_exact_draw_frequencies():
    d = JointDistribution(2, {(0, 0): F(1, 3), (1, 1): F(2, 3)})
    draws = d.draw(300_000, np.random.default_rng(0))
    assert set(np.unique(draws)) == {0, 3}
    assert abs(np.mean(draws == 3) - 2 / 3) < 4 * math.sqrt(2 / 9 / 300_000)


def test_single_sample_point_mass():
    d = JointDistribution.point_mass((1, 1, 1, 1))
    freq, verdict = sampler.single_sample_run(d, CH_SCENARIO, 100, seed=1)
    assert freq.vector.flat() == (1,) * 8
    assert verdict.inside and verdict.witness == {(1,) * 8: 1}


def test_single_sample_size_one_is_vertex():
    rng = np.random.default_rng(3)
    verts = set(polytope.enumerate_vertices(CH_SCENARIO))
    for seed in range(20):
        d = JointDistribution.random(4, rng)
        freq, verdict = sampler.single_sample_run(d, CH_SCENARIO, 1, seed)
        assert freq.vector.flat() in verts and verdict.inside


def test_single_sample_uniform_seed42():
    freq, verdict = sampler.single_sample_run(JointDistribution.uniform(4), CH_SCENARIO, 1000, seed=42)
    assert verdict.inside and verdict.exact
    assert all(v.denominator <= 1000 and 1000 % v.denominator == 0 for v in freq.vector.flat())
    verts = polytope.enumerate_vertices(CH_SCENARIO).vertices
    lam = verdict.witness
    assert sum(lam.values()) == 1
    assert all(sum(w * v[r] for v, w in lam.items()) == freq.vector.flat()[r] for r in range(8))
    assert set(lam) <= set(verts)


def test_single_sample_mismatch():
    with pytest.raises(sampler.MismatchError):
        sampler.single_sample_run(JointDistribution.uniform(3), CH_SCENARIO, 10, 0)


def test_reproducibility():
    d = JointDistribution.uniform(4)
    a, _ = sampler.single_sample_run(d, CH_SCENARIO, 500, seed=77)
    b, _ = sampler.single_sample_run(d, CH_SCENARIO, 500, seed=77)
    assert a == b
    src = PairwiseSource.from_joint(d, CH_SCENARIO)
    r1 = sampler.multi_sample_run(src, CH_SCENARIO, 1000, seed=5)
    r2 = sampler.multi_sample_run(src, CH_SCENARIO, 1000, seed=5)
    assert r1.frequencies == r2.frequencies


def test_subseeds_are_label_dependent_and_pure():
    assert _rng.subseed(1, "a") == _rng.subseed(1, "a")
    assert _rng.subseed(1, "a") != _rng.subseed(1, "b")
    assert _rng.subseed(1, "a") != _rng.subseed(2, "a")
    with pytest.raises(ValueError):
        _rng.check_seed(-1)


def test_multi_sample_quantum(optimal_angles):
    src = PairwiseSource.quantum(optimal_angles)
    res = sampler.multi_sample_run(src, CH_SCENARIO, 100_000, seed=11)
    analytic = (math.sqrt(2) - 1) / 2
    assert abs(float(res.ch_value) - analytic) < 0.01
    assert not res.verdict.inside
    # binomial standard error of S is below 0.005
    se_s = res.facet_standard_errors[[q.label for q in polytope.ch_facets()].index(
        "p2 + p3 - p13 + p14 - p23 - p24 >= 0")]
    assert se_s < 0.005


def test_multi_sample_consistent_marginals():
    d = JointDistribution.random(4, np.random.default_rng(21))
    src = PairwiseSource.from_joint(d, CH_SCENARIO)
    res = sampler.multi_sample_run(src, CH_SCENARIO, 10**6, seed=3)
    for (label, r), se in zip(res.facet_residuals, res.facet_standard_errors):
        assert float(r) > -3 * se, label


def test_multi_sample_point_mass_source():
    d = JointDistribution.point_mass((1, 0, 1, 1))
    src = PairwiseSource.from_joint(d, CH_SCENARIO)
    res = sampler.multi_sample_run(src, CH_SCENARIO, 50, seed=0)
    assert res.frequencies.vector.flat() in set(polytope.enumerate_vertices(CH_SCENARIO))
    assert res.verdict.inside


def test_multi_sample_pair_scenario_reports_boole_residuals():
    d = JointDistribution.uniform(2)
    res = sampler.multi_sample_run(PairwiseSource.from_joint(d, PAIR_SCENARIO), PAIR_SCENARIO, 1000, seed=1)
    assert [label for label, _ in res.facet_residuals][0] == "p12 >= 0"
    assert len(res.facet_standard_errors) == 4


def test_convergence_of_facet_violation():
    # both atoms sit on the CH facet S = 0, so sampling noise crosses it
    d = JointDistribution(4, {(0, 0, 0, 0): F(1, 2), (1, 1, 1, 1): F(1, 2)})
    src = PairwiseSource.from_joint(d, CH_SCENARIO)
    medians = []
    for size in (10**2, 10**4, 10**6):
        worst = []
        for seed in range(50):
            res = sampler.multi_sample_run(src, CH_SCENARIO, size, seed)
            worst.append(max(0.0, -min(float(r) for _, r in res.facet_residuals)))
        medians.append(float(np.median(worst)))
    assert medians[0] >= medians[1] >= medians[2]
    assert medians[0] > medians[2]


def test_uncertainty_multi_sample_saturated_case():
    v = sampler.uncertainty_multi_sample(SIGMA_X, SIGMA_Y, UP, 10**6, seed=7)
    assert v.lhs == pytest.approx(1, abs=1e-3) and v.rhs == pytest.approx(1, abs=1e-3)
    assert abs(v.lhs - v.rhs) <= v.band and v.holds


def test_uncertainty_multi_sample_self_commutator():
    psi = StateVector.normalized([0.6, 0.8j])
    for size in (2, 100, 10_000):
        v = sampler.uncertainty_multi_sample(SIGMA_X, SIGMA_X, psi, size, seed=size)
        assert v.rhs == 0 and v.holds


def test_uncertainty_multi_sample_size_two_band():
    v = sampler.uncertainty_multi_sample(SIGMA_X, SIGMA_Y, UP, 2, seed=3)
    big = sampler.uncertainty_multi_sample(SIGMA_X, SIGMA_Y, UP, 10**5, seed=3)
    assert v.band > 100 * big.band
    with pytest.raises(ValueError):
        sampler.uncertainty_multi_sample(SIGMA_X, SIGMA_Y, UP, 1, seed=3)


def test_uncertainty_band_calibration():
    # the 3-sigma verdict should almost never flag a saturated relation
    flagged = sum(
        not sampler.uncertainty_multi_sample(SIGMA_X, SIGMA_Y, UP, 10_000, seed=s).holds for s in range(200)
    )
    assert flagged <= 10
