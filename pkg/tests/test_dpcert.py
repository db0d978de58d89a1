import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdpkit.divergence import StatePair, hockey_stick_q, type2_error
from qdpkit.dpcert import (
    PrivacyParams,
    alt_pair,
    alt_pair_epsilon,
    certify_dp,
    corner_tests,
    dominance_audit,
    dominates,
    f_tradeoff,
    make_dp,
    mix_toward,
    region,
    region_contains,
    weakest_pair,
    weakest_pure_pair,
)
from qdpkit.errors import DimMismatch, InvalidParams, NotDP
from qdpkit.linop import DensityOperator
from qdpkit.sampling import random_mixed, random_pure

params = st.tuples(st.floats(0.0, 3.0), st.floats(0.0, 0.4)).map(lambda t: PrivacyParams(*t))


def test_params_validation():
    for bad in ((-0.1, 0.0), (1.0, 1.0), (1.0, -0.01), (math.nan, 0.0), (math.inf, 0.0)):
        with pytest.raises(InvalidParams):
            PrivacyParams(*bad)


def test_certify_examples(rng):
    s = random_mixed(3, rng)
    for p in (PrivacyParams(0, 0), PrivacyParams(1.5, 0.2)):
        assert certify_dp(StatePair(s, s), p).is_dp
    for eps, d in ((0.5, 0.0), (math.log(2), 0.1), (2.0, 0.3)):
        cert = certify_dp(weakest_pair(PrivacyParams(eps, d)), PrivacyParams(eps, d))
        assert cert.is_dp and cert.delta_star == pytest.approx(d, abs=1e-14)
    with pytest.raises(DimMismatch):
        certify_dp(StatePair(np.eye(2) / 2, np.eye(3) / 3), PrivacyParams(1, 0))


def test_alternative_pair_level():
    for eps, d in ((math.log(2), 0.1), (1.0, 0.05), (0.5, 0.2)):
        p = PrivacyParams(eps, d)
        pair = alt_pair(p)
        assert not certify_dp(pair, p).is_dp
        printed = math.log(p.e / (1 - d * (2 + p.e)))
        assert not certify_dp(pair, PrivacyParams(printed, d)).is_dp
        tight = alt_pair_epsilon(p)
        assert certify_dp(pair, PrivacyParams(tight, d)).is_dp
        assert not certify_dp(pair, PrivacyParams(tight - 1e-6, d)).is_dp
    with pytest.raises(InvalidParams):
        alt_pair(PrivacyParams(2.0, 0.2))


def test_f_tradeoff_examples():
    p = PrivacyParams(math.log(2), 0.1)
    w = 0.9 / 3
    assert f_tradeoff(p, w) == pytest.approx(w)
    assert f_tradeoff(p, np.array([0.9, 0.95, 1.0])) == pytest.approx([0, 0, 0])
    assert f_tradeoff(PrivacyParams(0, 0), 0.3) == pytest.approx(0.7)


@given(params)
def test_f_tradeoff_shape(p):
    a = np.linspace(0, 1, 201)
    f = f_tradeoff(p, a)
    assert np.all(np.diff(f) <= 1e-14)
    assert np.all(np.diff(f, 2) >= -1e-12)
    assert np.all(f <= 1 - a + 1e-15)


def test_weakest_pair_examples():
    w = weakest_pair(PrivacyParams(0, 0))
    assert np.allclose(w.rho.matrix, np.diag([0, 0.5, 0.5, 0]))
    assert np.allclose(w.rho.matrix, w.sigma.matrix)
    w = weakest_pair(PrivacyParams(math.log(2), 0.1))
    assert np.allclose(np.diag(w.rho.matrix).real, [0.1, 0.6, 0.3, 0])
    assert np.allclose(np.diag(w.sigma.matrix).real, [0, 0.3, 0.6, 0.1])
    assert np.allclose(weakest_pure_pair(math.log(3)).rho.matrix, np.diag([0.75, 0.25]))


def test_hockey_stick_closed_form():
    p = PrivacyParams(1.2, 0.15)
    w = weakest_pair(p)
    for g in np.linspace(1, p.e + 2, 30):
        closed = (p.e - g + p.delta * (g + 1)) / (p.e + 1) if g <= p.e else p.delta
        assert hockey_stick_q(w, g) == pytest.approx(closed, abs=1e-12)


def test_region_examples():
    p = PrivacyParams(math.log(2), 0.1)
    r = region(p)
    assert region_contains(r, 0.1, 1.0)
    assert not region_contains(r, 0.0, 0.0)
    assert region_contains(r, 0.9, 0.1)
    assert r.worst_fixed_point == pytest.approx((0.3, 0.3))
    assert r.best_fixed_point == pytest.approx((2.1 / 3, 2.1 / 3))
    expected = [(0, 0.9), (0.3, 0.3), (0.9, 0), (1, 0), (1, 0.1), (0.7, 0.7), (0.1, 1), (0, 1)]
    assert np.allclose(r.vertices, expected)


@given(params)
def test_region_vertices_and_convexity(p):
    r = region(p)
    v = np.array(r.vertices)
    for a, b in v:
        assert region_contains(r, a, b, tol=1e-12)
    # counter-clockwise convex ring; at eps = delta = 0 it degenerates to the segment beta = 1 - alpha
    n = len(v)
    for i in range(n):
        a, b, c = v[i - 1], v[i], v[(i + 1) % n]
        assert (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) >= -1e-14
    area = 0.5 * sum(v[i - 1][0] * v[i][1] - v[i][0] * v[i - 1][1] for i in range(n))
    if area < 1e-12:
        assert np.allclose(v.sum(axis=1), 1.0)
        return
    # points just outside each edge midpoint are rejected when the edge is inside the square
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        mid = 0.5 * (a + b)
        normal = np.array([b[1] - a[1], a[0] - b[0]])
        out = mid + 1e-6 * normal / np.linalg.norm(normal)
        assert not region_contains(r, *out, tol=0)


def test_region_is_error_pairs_of_dp_pairs(rng):
    p = PrivacyParams(0.8, 0.1)
    r = region(p)
    for _ in range(30):
        pair = make_dp(StatePair(random_mixed(3, rng), random_mixed(3, rng)), p)
        for a in np.linspace(0, 1, 11):
            assert region_contains(r, a, float(type2_error(pair, a)), tol=1e-8)


def test_corner_tests_hit_vertices():
    p = PrivacyParams(0.9, 0.12)
    r = region(p)
    for ct in corner_tests(p):
        assert region_contains(r, ct.alpha, ct.beta, tol=1e-12)
        assert min(np.min(np.abs(np.array(r.vertices) - [ct.alpha, ct.beta]).sum(axis=1)), 1) < 1e-12
    labels = {c.label: (c.alpha, c.beta) for c in corner_tests(p)}
    assert labels["worst fixed point"] == pytest.approx(r.worst_fixed_point)
    assert labels["best fixed point"] == pytest.approx(r.best_fixed_point)


def test_dominates_examples(rng):
    p = PrivacyParams(1.0, 0.1)
    w = weakest_pair(p)
    assert dominates(w, w)
    s = random_mixed(3, rng)
    assert dominates(w, StatePair(s, s))
    assert not dominates(StatePair(s, s), w)
    weaker = weakest_pair(PrivacyParams(0.5, 0.05))
    assert dominates(w, weaker)
    assert not dominates(weaker, w)
    with pytest.raises(InvalidParams):
        dominates(w, w, grid=1)


def test_dominates_reflexive_and_post_processing(rng):
    from qdpkit.contraction import QuantumChannel, apply

    ch = QuantumChannel.depolarized_measurement(3, 0.6)
    for _ in range(5):
        pair = StatePair(random_mixed(3, rng), random_pure(3, rng))
        assert dominates(pair, pair)
        assert dominates(pair, StatePair(apply(ch, pair.rho), apply(ch, pair.sigma)))


def test_dominance_audit_and_not_dp(rng):
    p = PrivacyParams(0.7, 0.05)
    pair = make_dp(StatePair(random_mixed(3, rng), random_mixed(3, rng)), p)
    rep = dominance_audit(pair, p)
    assert rep.ok()
    assert rep.delta_star <= p.delta + 1e-12
    assert rep.renyi_slack[2.0] == math.inf
    js = rep.to_json()
    assert js["epsilon"] == p.epsilon and len(js["dh_slack"]) == 101
    with pytest.raises(NotDP):
        dominance_audit(weakest_pair(PrivacyParams(2.0, 0.2)), p)
    pure = PrivacyParams(1.0, 0.0)
    rep = dominance_audit(make_dp(StatePair(random_pure(2, rng), random_pure(2, rng)), pure), pure)
    assert rep.ok() and set(rep.pure) == {"kl_vs_eps_tanh", "trace_norm_vs_2tanh"}


@given(st.integers(0, 2**32 - 1), params)
def test_make_dp_lands_on_boundary(seed, p):
    rng = np.random.default_rng(seed)
    pair = StatePair(random_mixed(3, rng), random_pure(3, rng))
    out = make_dp(pair, p)
    cert = certify_dp(out, p)
    assert cert.is_dp
    if not certify_dp(pair, p).is_dp:
        assert cert.delta_star >= p.delta - 1e-6


def test_mix_toward_endpoints(rng):
    pair = StatePair(random_mixed(2, rng), random_mixed(2, rng))
    assert np.allclose(mix_toward(pair, 0).rho.matrix, pair.rho.matrix)
    one = mix_toward(pair, 1)
    assert np.allclose(one.rho.matrix, one.sigma.matrix)


def test_pure_pair_matches_weakest_block():
    eps = 1.3
    w4 = weakest_pair(PrivacyParams(eps, 0.0))
    w2 = weakest_pure_pair(eps)
    assert np.allclose(np.diag(w4.rho.matrix)[1:3], np.diag(w2.rho.matrix))
    g = np.linspace(0, 5, 21)
    assert np.allclose(hockey_stick_q(w4, g), hockey_stick_q(w2, g), atol=1e-14)
    assert isinstance(w2.rho, DensityOperator)
