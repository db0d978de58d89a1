import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import np_primal_beta
from qdpkit.classical import kl_c, np_beta_c, renyi_c
from qdpkit.divergence import (
    FWeight,
    StatePair,
    dmax,
    f_divergence,
    hockey_stick_q,
    hockey_stick_variational,
    hyp_test_div,
    measured_renyi_half,
    mixture_kl_bound,
    relative_entropy,
    relative_entropy_integral,
    renyi_hockey,
    reversed_pinsker_check,
    smooth_truncate,
    type2_error,
)
from qdpkit.dpcert import PrivacyParams, f_tradeoff, weakest_pair, weakest_pure_pair
from qdpkit.errors import DimMismatch, DomainViolation, OrthogonalStates, SupportViolation
from qdpkit.linop import DensityOperator
from qdpkit.sampling import random_diagonal, random_effect, random_mixed, random_pure, random_unitary, trial_rng

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 5)


def rand_pair(rng, dim, kind="mixed"):
    if kind == "pure":
        return StatePair(random_pure(dim, rng), random_pure(dim, rng))
    if kind == "diag":
        return StatePair(random_diagonal(dim, rng), random_diagonal(dim, rng))
    return StatePair(random_mixed(dim, rng), random_mixed(dim, rng))


def rotated(pair, u):
    return StatePair(u @ pair.rho.matrix @ u.conj().T, u @ pair.sigma.matrix @ u.conj().T)


# --- hockey-stick --------------------------------------------------------


def test_hockey_stick_examples():
    s = DensityOperator(np.eye(3) / 3)
    assert hockey_stick_q(StatePair(s, s), 1.0) == pytest.approx(0, abs=1e-15)
    p = PrivacyParams(math.log(2), 0.1)
    assert hockey_stick_q(weakest_pair(p), 1.5) == pytest.approx(0.25)
    assert hockey_stick_q(weakest_pair(p), 7.0) == pytest.approx(0.1)


def test_dim_mismatch():
    with pytest.raises(DimMismatch):
        StatePair(np.eye(2) / 2, np.eye(3) / 3)


@given(dims, seeds, st.floats(0, 5))
def test_hockey_stick_variational(d, seed, g):
    rng = np.random.default_rng(seed)
    pair = rand_pair(rng, d)
    val, lam = hockey_stick_variational(pair, g)
    assert val == pytest.approx(hockey_stick_q(pair, g), abs=1e-12)
    for _ in range(20):
        e = random_effect(d, rng)
        assert np.real(np.trace(e @ (pair.rho.matrix - g * pair.sigma.matrix))) <= val + 1e-12
    assert 0 <= val <= 1 + 1e-12


@given(dims, seeds)
def test_hockey_stick_convex_nonincreasing_and_vanishing(d, seed):
    pair = rand_pair(np.random.default_rng(seed), d)
    g = np.linspace(0, 6, 121)
    e = hockey_stick_q(pair, g)
    assert np.all(np.diff(e) <= 1e-12)
    assert np.all(np.diff(e, 2) >= -1e-10)
    top = math.exp(dmax(pair))
    assert hockey_stick_q(pair, top * (1 + 1e-9)) <= 1e-9
    assert hockey_stick_q(pair, top * 1.5) <= 1e-12


def test_array_gamma_matches_scalar(rng):
    pair = rand_pair(rng, 4)
    g = np.linspace(0, 3, 7)
    assert np.allclose(hockey_stick_q(pair, g), [hockey_stick_q(pair, x) for x in g], atol=1e-14)


def test_breakpoints_are_generalized_eigenvalues(rng):
    pair = rand_pair(rng, 3)
    for g in pair.breakpoints():
        assert abs(np.linalg.det(pair.rho.matrix - g * pair.sigma.matrix)) < 1e-10
    assert np.allclose(weakest_pair(PrivacyParams(1.0, 0.1)).breakpoints(), [math.exp(-1), math.e])


# --- hypothesis testing --------------------------------------------------


def test_hyp_test_identical_states():
    s = DensityOperator(random_mixed(3, np.random.default_rng(1)))
    a = np.linspace(0, 0.99, 23)
    assert np.allclose(hyp_test_div(StatePair(s, s), a), -np.log(1 - a), atol=1e-9)
    assert hyp_test_div(StatePair(s, s), 1.0) == math.inf


def test_hyp_test_weakest_pair():
    p = PrivacyParams(0.7, 0.15)
    a = np.linspace(0, 1, 41)
    f = f_tradeoff(p, a)
    dh = hyp_test_div(weakest_pair(p), a)
    fin = f > 0
    assert np.allclose(dh[fin], -np.log(f[fin]), atol=1e-9)
    assert np.all(np.isinf(dh[~fin]))


def test_hyp_test_alpha_zero_uses_kernel():
    rho = DensityOperator.diag([0.5, 0.5, 0.0])
    sigma = DensityOperator.diag([0.2, 0.3, 0.5])
    assert type2_error(StatePair(rho, sigma), 0.0) == pytest.approx(0.5)


def test_hyp_test_commuting_matches_neyman_pearson(rng):
    for _ in range(30):
        pair = rand_pair(rng, 4, "diag")
        u = random_unitary(4, rng)
        p, q = np.diag(pair.rho.matrix).real, np.diag(pair.sigma.matrix).real
        rot = rotated(pair, u)
        assert type2_error(rot, 0.25) == pytest.approx(np_beta_c(p, q, 0.25), abs=1e-9)


def test_duality_against_primal_np_family():
    alphas = np.linspace(0.1, 0.9, 9)
    worst = 0.0
    for i in range(500):
        rng = trial_rng(2024, i)
        d = int(rng.integers(2, 7))
        kind = ("mixed", "pure", "diag")[i % 3]
        pair = rand_pair(rng, d, kind)
        if kind == "diag":
            pair = rotated(pair, random_unitary(d, rng))
        dual = type2_error(pair, alphas)
        primal = np_primal_beta(pair.rho.matrix, pair.sigma.matrix, alphas)
        worst = max(worst, float(np.max(np.abs(dual - primal))))
    assert worst <= 1e-6


@given(dims, seeds)
def test_beta_monotone_convex(d, seed):
    pair = rand_pair(np.random.default_rng(seed), d)
    a = np.linspace(0, 1, 41)
    b = type2_error(pair, a)
    assert np.all(np.diff(b) <= 1e-10)
    assert np.all(np.diff(b, 2) >= -1e-9)
    dh = hyp_test_div(pair, a)
    fin = np.isfinite(dh)
    assert np.all(np.diff(dh[fin]) >= -1e-9)


@given(dims, seeds, st.floats(0.0, 2.0), st.floats(0.0, 0.3))
def test_dp_characterization(d, seed, eps, delta):
    rng = np.random.default_rng(seed)
    pair = rand_pair(rng, d)
    e = math.exp(eps)
    tight = hockey_stick_q(pair, e)
    effects = [random_effect(d, rng) for _ in range(200)]
    viol = [
        np.real(np.trace(x @ pair.rho.matrix)) - e * np.real(np.trace(x @ pair.sigma.matrix)) for x in effects
    ]
    if tight <= delta:
        assert max(viol) <= delta + 1e-12
    # the optimal projector certifies the failure direction exactly
    val, lam = hockey_stick_variational(pair, e)
    assert max(viol) <= val + 1e-12
    assert (val <= delta) == (tight <= delta)


# --- relative entropy and friends ---------------------------------------


def test_relative_entropy_examples():
    s = DensityOperator(random_mixed(3, np.random.default_rng(2)))
    assert relative_entropy(StatePair(s, s)) == pytest.approx(0, abs=1e-12)
    for eps in (0.3, math.log(2), 2.0):
        assert relative_entropy(weakest_pure_pair(eps)) == pytest.approx(eps * math.tanh(eps / 2), abs=1e-13)
    pair = StatePair(DensityOperator.diag([1, 0]), DensityOperator(np.eye(2) / 2))
    assert relative_entropy(pair) == pytest.approx(math.log(2))
    assert relative_entropy(pair.swapped()) == math.inf


def test_relative_entropy_integral_agrees(rng):
    for i in range(40):
        pair = rand_pair(rng, int(rng.integers(2, 5)), ("mixed", "diag")[i % 2])
        assert relative_entropy_integral(pair) == pytest.approx(relative_entropy(pair), abs=1e-6)
    # rank-deficient rho inside a full-rank sigma
    pair = StatePair(random_pure(3, rng), random_mixed(3, rng))
    assert relative_entropy_integral(pair) == pytest.approx(relative_entropy(pair), abs=1e-6)


def test_dmax_chain(rng):
    for _ in range(100):
        d = int(rng.integers(2, 5))
        rho, rho2, sigma = (random_mixed(d, rng) for _ in range(3))
        lhs = relative_entropy(StatePair(rho, sigma))
        rhs = relative_entropy(StatePair(rho, rho2)) + dmax(StatePair(rho2, sigma))
        assert lhs <= rhs + 1e-10


def test_dmax_values():
    e = 1.7
    assert dmax(weakest_pure_pair(e)) == pytest.approx(e)
    assert dmax(weakest_pair(PrivacyParams(1.0, 0.1))) == math.inf


# --- f-divergences -------------------------------------------------------


def test_f_divergence_identity_zero(rng):
    s = random_mixed(3, rng)
    for f in (FWeight.kl(), FWeight.chi_squared(), FWeight.squared_hellinger()):
        assert f_divergence(StatePair(s, s), f) == pytest.approx(0, abs=1e-10)


def test_f_divergence_kl_matches(rng):
    for eps in (0.4, 1.1):
        assert f_divergence(weakest_pure_pair(eps), FWeight.kl()) == pytest.approx(eps * math.tanh(eps / 2), abs=1e-8)
    for _ in range(20):
        pair = rand_pair(rng, int(rng.integers(2, 5)))
        assert f_divergence(pair, FWeight.kl()) == pytest.approx(relative_entropy(pair), abs=1e-6)


def test_f_divergence_classical_oracles(rng):
    for _ in range(10):
        pair = rand_pair(rng, 3, "diag")
        p, q = np.diag(pair.rho.matrix).real, np.diag(pair.sigma.matrix).real
        assert f_divergence(pair, FWeight.chi_squared()) == pytest.approx(np.sum((p - q) ** 2 / q), abs=1e-6)
        hell = np.sum((np.sqrt(p) - np.sqrt(q)) ** 2)
        assert f_divergence(pair, FWeight.squared_hellinger()) == pytest.approx(hell, abs=1e-6)


def test_f_divergence_unsupported():
    pair = weakest_pair(PrivacyParams(1.0, 0.1))
    assert f_divergence(pair, FWeight.kl()) == math.inf
    p, q = np.diag(pair.rho.matrix).real, np.diag(pair.sigma.matrix).real
    hell = np.sum((np.sqrt(p) - np.sqrt(q)) ** 2)
    assert f_divergence(pair, FWeight.squared_hellinger()) == pytest.approx(hell, abs=1e-6)
    probe = FWeight(lambda x: 1.0 / x)  # no integrability hints: detected numerically
    assert f_divergence(pair, probe) == math.inf


# --- Renyi ---------------------------------------------------------------


def test_renyi_examples(rng):
    s = random_mixed(3, rng)
    for a in (0.3, 0.5, 2.0, 3.0):
        assert renyi_hockey(StatePair(s, s), a) == pytest.approx(0, abs=1e-9)
    pair = rand_pair(rng, 2, "diag")
    p, q = np.diag(pair.rho.matrix).real, np.diag(pair.sigma.matrix).real
    assert renyi_hockey(pair, 2.0) == pytest.approx(renyi_c(p, q, 2.0), abs=1e-7)
    w = weakest_pure_pair(math.log(3))
    assert renyi_hockey(w, 0.5) == pytest.approx(renyi_c([0.75, 0.25], [0.25, 0.75], 0.5), abs=1e-9)


def test_renyi_commuting_random(rng):
    for _ in range(15):
        d = int(rng.integers(2, 5))
        pair = rand_pair(rng, d, "diag")
        p, q = np.diag(pair.rho.matrix).real, np.diag(pair.sigma.matrix).real
        u = random_unitary(d, rng)
        for a in (0.25, 0.5, 1.5, 2.0):
            assert renyi_hockey(rotated(pair, u), a) == pytest.approx(renyi_c(p, q, a), abs=1e-6)


def test_renyi_domain():
    pair = weakest_pair(PrivacyParams(1.0, 0.1))
    with pytest.raises(DomainViolation):
        renyi_hockey(pair, 2.0)
    assert math.isfinite(renyi_hockey(pair, 0.5))
    orth = StatePair(DensityOperator.diag([1, 0]), DensityOperator.diag([0, 1]))
    with pytest.raises(DomainViolation):
        renyi_hockey(orth, 0.5)
    p = np.array([0.1, 0.6, 0.3, 0])
    assert renyi_hockey(pair, 0.0) == pytest.approx(-math.log(1 - 0.1))
    assert renyi_c(p, [0, 0.3, 0.6, 0.1], 0.0) == pytest.approx(renyi_hockey(pair, 0.0))


def test_measured_renyi_half():
    s = DensityOperator(np.eye(2) / 2)
    assert measured_renyi_half(StatePair(s, s)) == pytest.approx(0, abs=1e-12)
    p, q = [0.75, 0.25], [0.25, 0.75]
    pair = StatePair(DensityOperator.diag(p), DensityOperator.diag(q))
    assert measured_renyi_half(pair) == pytest.approx(renyi_c(p, q, 0.5), abs=1e-12)
    zero = DensityOperator.pure([1, 0])
    plus = DensityOperator.pure([1, 1])
    assert measured_renyi_half(StatePair(zero, plus)) == pytest.approx(math.log(2), abs=1e-7)
    assert measured_renyi_half(StatePair(zero, plus), "half") == pytest.approx(0.25 * math.log(2), abs=1e-7)
    with pytest.raises(OrthogonalStates):
        measured_renyi_half(StatePair(zero, DensityOperator.pure([0, 1])))


def test_measured_renyi_half_convention_disagrees_classically():
    # the -1/2 reading does not reproduce the classical order-1/2 divergence
    p, q = [0.75, 0.25], [0.25, 0.75]
    pair = StatePair(DensityOperator.diag(p), DensityOperator.diag(q))
    assert abs(measured_renyi_half(pair, "half") - renyi_c(p, q, 0.5)) > 1e-3


# --- smoothing, mixtures, Pinsker --------------------------------------


def test_smooth_truncate_examples(rng):
    e = math.log(2)
    w = weakest_pure_pair(e)
    out = smooth_truncate(w, e)
    assert np.allclose(out.rho_tilde.matrix, w.rho.matrix, atol=1e-12)
    assert out.dmax_val <= e + 1e-12
    out = smooth_truncate(weakest_pair(PrivacyParams(e, 0.1)), e)
    assert out.l1_dist <= math.sqrt(0.1 * 1.9)
    assert out.l1_dist == pytest.approx(0.1)
    s = random_mixed(3, rng)
    out = smooth_truncate(StatePair(s, s), 0.5)
    assert np.allclose(out.rho_tilde.matrix, s.matrix, atol=1e-10)
    assert out.dmax_val <= 1e-9


@given(dims, seeds, st.floats(0.0, 2.0))
def test_smooth_truncate_bounds(d, seed, eps):
    rng = np.random.default_rng(seed)
    pair = rand_pair(rng, d, "pure" if seed % 3 == 0 else "mixed")
    if hockey_stick_q(pair, math.exp(eps)) > 0.95:
        return
    out = smooth_truncate(pair, eps)
    assert out.dmax_val <= out.dmax_bound + 1e-8
    assert out.l1_dist <= out.l1_bound + 1e-10


def test_mixture_kl_bound_examples(rng):
    rho, s1, s2 = (random_mixed(3, rng) for _ in range(3))
    single = mixture_kl_bound(rho, [(1.0, s1)])
    d = relative_entropy(StatePair(rho, s1))
    assert single.bound_simple == pytest.approx(d) and single.bound_tight == pytest.approx(d)
    b = mixture_kl_bound(rho, [(0.5, rho), (0.5, s2)])
    assert b.bound_tight <= math.log(2) + 1e-12
    p1, p2 = random_diagonal(3, rng), random_diagonal(3, rng)
    r = random_diagonal(3, rng)
    b = mixture_kl_bound(r, [(0.3, p1), (0.7, p2)])
    mix = 0.3 * np.diag(p1.matrix).real + 0.7 * np.diag(p2.matrix).real
    assert kl_c(np.diag(r.matrix).real, mix) <= b.bound_tight + 1e-12 <= b.bound_simple + 2e-12
    with pytest.raises(SupportViolation):
        mixture_kl_bound(DensityOperator.diag([0.5, 0.5]), [(1.0, DensityOperator.diag([1.0, 0.0]))])


@given(dims, seeds, st.floats(0.05, 0.95))
def test_mixture_kl_bound_order(d, seed, w):
    rng = np.random.default_rng(seed)
    rho, s1, s2 = (random_mixed(d, rng) for _ in range(3))
    b = mixture_kl_bound(rho, [(w, s1), (1 - w, s2)])
    actual = relative_entropy(StatePair(rho, DensityOperator(w * s1.matrix + (1 - w) * s2.matrix)))
    assert actual <= b.bound_tight + 1e-10
    assert b.bound_tight <= b.bound_simple + 1e-12


def test_reversed_pinsker(rng):
    s = random_mixed(2, rng)
    assert reversed_pinsker_check(StatePair(s, s)) == pytest.approx((0, 0), abs=1e-12)
    lhs, rhs = reversed_pinsker_check(weakest_pure_pair(math.log(2)))
    assert lhs == pytest.approx(math.log(2) / 3)
    assert rhs == pytest.approx(2 * 3 * (1 / 3) ** 2)
    for _ in range(50):
        lhs, rhs = reversed_pinsker_check(rand_pair(rng, 3))
        assert lhs <= rhs + 1e-12
    with pytest.raises(SupportViolation):
        reversed_pinsker_check(StatePair(DensityOperator.diag([0.5, 0.5]), DensityOperator.diag([1.0, 0])))
