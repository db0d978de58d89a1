"""(ε, δ)-DP certification of state pairs, the characteristic region, the
weakest pair and dominance checks against it."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .divergence import (
    BETA_FLOOR,
    StatePair,
    hockey_stick_q,
    hyp_test_div,
    relative_entropy,
    renyi_hockey,
    _pair,
)
from .errors import DomainViolation, InvalidParams, NotDP
from .linop import DensityOperator, trace_norm

TOL_DOM = 1e-8
TOL_CERT = 1e-12


@dataclass(frozen=True)
class PrivacyParams:
    """Privacy level with ``epsilon >= 0`` and ``0 <= delta < 1``."""

    epsilon: float
    delta: float = 0.0

    def __post_init__(self):
        eps, delta = float(self.epsilon), float(self.delta)
        if not (math.isfinite(eps) and eps >= 0):
            raise InvalidParams(f"epsilon must be finite and >= 0, got {self.epsilon!r}")
        if not (0.0 <= delta < 1.0):
            raise InvalidParams(f"delta must lie in [0, 1), got {self.delta!r}")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "delta", delta)

    @property
    def e(self) -> float:
        return math.exp(self.epsilon)


def _params(p) -> PrivacyParams:
    if isinstance(p, PrivacyParams):
        return p
    return PrivacyParams(*p)


class Certificate(NamedTuple):
    is_dp: bool
    delta_star: float


def certify_dp(pair: StatePair, p: PrivacyParams) -> Certificate:
    """Decide (ε, δ)-DP and report the tight δ at this ε.

    ``delta_star = max{E_{e^ε}(ρ‖σ), E_{e^ε}(σ‖ρ)}``.
    """
    pair, p = _pair(pair), _params(p)
    d = max(pair.hockey_stick(p.e), pair.swapped().hockey_stick(p.e))
    return Certificate(bool(d <= p.delta + TOL_CERT), float(d))


def f_tradeoff(p: PrivacyParams, alpha):
    """Trade-off function ``max{1 − δ − e^ε α, e^{−ε}(1 − δ − α), 0}``.

    Values under the type-II floor of the hypothesis-testing solver are
    reported as exactly zero.
    """
    p = _params(p)
    a = np.asarray(alpha, dtype=float)
    if np.any((a < 0) | (a > 1)):
        raise InvalidParams("alpha must lie in [0, 1]")
    f = np.maximum.reduce(
        [1.0 - p.delta - p.e * a, math.exp(-p.epsilon) * (1.0 - p.delta - a), np.zeros_like(a)]
    )
    f = np.where(f <= BETA_FLOOR, 0.0, f)
    return float(f) if f.ndim == 0 else f


def weakest_pair(p: PrivacyParams) -> StatePair:
    """The four-dimensional diagonal pair saturating every (ε, δ)-DP constraint.

    Basis order is ``|00>, |01>, |10>, |11>``.
    """
    p = _params(p)
    e, d = p.e, p.delta
    hi, lo = (1 - d) * e / (1 + e), (1 - d) / (1 + e)
    return StatePair(DensityOperator.diag([d, hi, lo, 0.0]), DensityOperator.diag([0.0, lo, hi, d]))


def weakest_pure_pair(eps: float) -> StatePair:
    """Qubit pair ``diag(e^ε, 1)/(1+e^ε)`` and ``diag(1, e^ε)/(1+e^ε)``."""
    e = _params((eps, 0.0)).e
    return StatePair(DensityOperator.diag([e / (1 + e), 1 / (1 + e)]), DensityOperator.diag([1 / (1 + e), e / (1 + e)]))


def alt_pair(p: PrivacyParams) -> StatePair:
    """Alternative four-dimensional pair with the δ mass placed differently.

    Raises:
        InvalidParams: when ``1 − 2δ − e^ε δ < 0``.
    """
    p = _params(p)
    e, d = p.e, p.delta
    small = 1 - 2 * d - e * d
    if small < 0:
        raise InvalidParams("alternative pair needs 1 - 2*delta - e^eps*delta >= 0")
    a, b = small / (1 + e), (e + d) / (1 + e)
    return StatePair(DensityOperator.diag([d, a, b, 0.0]), DensityOperator.diag([0.0, b, a, d]))


def alt_pair_epsilon(p: PrivacyParams) -> float:
    """Smallest ε' at which :func:`alt_pair` is (ε', δ)-DP (for δ > 0).

    For γ ≥ 1, ``E_γ = δ + [b − γ a]_+``, which drops to δ at ``γ = b/a``.
    """
    p = _params(p)
    e, d = p.e, p.delta
    small = 1 - 2 * d - e * d
    if small <= 0:
        return math.inf
    return math.log((e + d) / small)


@dataclass(frozen=True)
class Region:
    """Achievable (type-I, type-II) error pairs under (ε, δ)-DP."""

    params: PrivacyParams
    vertices: tuple
    worst_fixed_point: tuple
    best_fixed_point: tuple

    @property
    def fixed_points(self) -> tuple:
        return (self.worst_fixed_point, self.best_fixed_point)

    def constraints(self, alpha: float, beta: float) -> np.ndarray:
        """Slacks of the four defining inequalities (nonnegative inside)."""
        e, d = self.params.e, self.params.delta
        return np.array(
            [
                beta - math.exp(-self.params.epsilon) * (1 - d - alpha),
                beta - (1 - d - e * alpha),
                (1 - math.exp(-self.params.epsilon) * (alpha - d)) - beta,
                (e * (1 - alpha) + d) - beta,
            ]
        )

    def to_rows(self) -> list[tuple[float, float]]:
        return list(self.vertices)


def region(p: PrivacyParams) -> Region:
    """Characteristic region ``R(ε, δ)`` as a counter-clockwise polygon in the unit square.

    Besides the six corners of the four constraints, the unit-square corners
    ``(0, 1)`` and ``(1, 0)`` belong to the region and close the polygon.
    Coincident vertices (for instance when δ = 0) are merged.
    """
    p = _params(p)
    e, d = p.e, p.delta
    w = (1 - d) / (1 + e)
    b = (e + d) / (1 + e)
    ring = [(0.0, 1 - d), (w, w), (1 - d, 0.0), (1.0, 0.0), (1.0, d), (b, b), (d, 1.0), (0.0, 1.0)]
    verts: list[tuple[float, float]] = []
    for v in ring:
        if not verts or max(abs(v[0] - verts[-1][0]), abs(v[1] - verts[-1][1])) > 1e-14:
            verts.append(v)
    if len(verts) > 1 and max(abs(verts[0][0] - verts[-1][0]), abs(verts[0][1] - verts[-1][1])) <= 1e-14:
        verts.pop()
    # drop vertices lying on a straight edge
    changed = True
    while changed and len(verts) > 2:
        changed = False
        for i in range(len(verts)):
            a, c, nxt = verts[i - 1], verts[i], verts[(i + 1) % len(verts)]
            cross = (c[0] - a[0]) * (nxt[1] - c[1]) - (c[1] - a[1]) * (nxt[0] - c[0])
            if abs(cross) <= 1e-14:
                verts.pop(i)
                changed = True
                break
    return Region(p, tuple(verts), (w, w), (b, b))


def region_contains(r: Region, alpha: float, beta: float, tol: float = 1e-12) -> bool:
    if not (-tol <= alpha <= 1 + tol and -tol <= beta <= 1 + tol):
        return False
    return bool(np.all(r.constraints(alpha, beta) >= -tol))


class CornerTest(NamedTuple):
    label: str
    test: np.ndarray
    alpha: float
    beta: float


def corner_tests(p: PrivacyParams) -> list[CornerTest]:
    """Diagonal tests ``0 ≤ Λ ≤ I`` whose error pairs on the weakest pair hit each corner.

    ``α = Tr[Λρ]`` and ``β = 1 − Tr[Λσ]``.
    """
    pair = weakest_pair(p)
    tests = {
        "(0,1)": np.zeros(4),
        "(0,1-delta)": np.array([0, 0, 0, 1.0]),
        "worst fixed point": np.array([0, 0, 1.0, 1.0]),
        "(1-delta,0)": np.array([0, 1.0, 1.0, 1.0]),
        "(1,0)": np.ones(4),
        "(1,delta)": np.array([1.0, 1.0, 1.0, 0]),
        "best fixed point": np.array([1.0, 1.0, 0, 0]),
        "(delta,1)": np.array([1.0, 0, 0, 0]),
    }
    # tests here reject rho in favour of sigma, so alpha is the mass they put on rho
    out = []
    for label, diag in tests.items():
        lam = np.diag(diag)
        a = float(np.real(np.trace(lam @ pair.rho.matrix)))
        b = 1.0 - float(np.real(np.trace(lam @ pair.sigma.matrix)))
        out.append(CornerTest(label, lam, a, b))
    return out


def _dominance_grid(pairs: list[StatePair], grid: int) -> np.ndarray:
    """Uniform grid on ``[0, Γ]`` merged with every kink of every E_γ involved."""
    dms = []
    for pr in pairs:
        for q in (pr, pr.swapped()):
            bk = q.breakpoints()
            if bk.size:
                dms.append(float(bk.max()))
    gmax = max([1.0, *dms]) + 1.0
    pts = [np.linspace(0.0, gmax, max(grid, 2))]
    for pr in pairs:
        for q in (pr, pr.swapped()):
            bk = q.breakpoints()
            pts.append(bk[bk <= gmax])
    return np.unique(np.concatenate(pts))


def dominance_slack(pair_a: StatePair, pair_b: StatePair, grid: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Grid and slacks ``E_γ(A) − E_γ(B)`` for both argument orders, stacked as rows."""
    pair_a, pair_b = _pair(pair_a), _pair(pair_b)
    g = _dominance_grid([pair_a, pair_b], grid)
    fwd = pair_a.hockey_stick(g) - pair_b.hockey_stick(g)
    rev = pair_a.swapped().hockey_stick(g) - pair_b.swapped().hockey_stick(g)
    return g, np.vstack([fwd, rev])


def dominates(
    pair_a: StatePair, pair_b: StatePair, grid: int = 200, alpha_checks: int = 11
) -> bool:
    """True when ``A`` is at least as informative as ``B``.

    Decided on ``E_γ`` in both argument orders over ``[0, Γ]`` with ``Γ`` above
    every kink; ``D_H^α`` is spot-checked on ``alpha_checks`` points.
    """
    if grid < 2:
        raise InvalidParams("grid must have at least 2 points")
    pair_a, pair_b = _pair(pair_a), _pair(pair_b)
    _, slack = dominance_slack(pair_a, pair_b, grid)
    if np.min(slack) < -TOL_DOM:
        return False
    if alpha_checks >= 2:
        al = np.linspace(0.0, 1.0, alpha_checks)
        da, db = hyp_test_div(pair_a, al), hyp_test_div(pair_b, al)
        for x, y in zip(da, db):
            if math.isinf(x):
                continue
            if x < y - 1e-6 * max(1.0, abs(y)):
                return False
    return True


@functools.lru_cache(maxsize=64)
def _weakest_scalars(eps: float, delta: float) -> dict:
    pair = weakest_pair(PrivacyParams(eps, delta))
    vals = {"kl": relative_entropy(pair)}
    for a in (0.5, 2.0):
        try:
            vals[a] = renyi_hockey(pair, a)
        except DomainViolation:
            vals[a] = math.inf
    return vals


def _slack(upper: float, value: float) -> float:
    if math.isinf(upper):
        return math.inf
    return upper - value


@dataclass
class DominanceReport:
    """Slacks of the dominance inequalities for one pair (all should be ≥ 0)."""

    params: PrivacyParams
    delta_star: float
    alpha_grid: np.ndarray
    dh_slack: np.ndarray
    gamma_grid: np.ndarray
    egamma_slack: np.ndarray
    egamma_slack_reverse: np.ndarray
    kl_slack: float
    renyi_slack: dict
    pure: dict = field(default_factory=dict)

    def min_slack(self) -> float:
        vals = [
            np.min(self.dh_slack),
            np.min(self.egamma_slack),
            np.min(self.egamma_slack_reverse),
            self.kl_slack,
            *self.renyi_slack.values(),
            *self.pure.values(),
        ]
        return float(min(vals))

    def ok(self, tol: float = TOL_DOM) -> bool:
        return self.min_slack() >= -tol

    def to_json(self) -> dict:
        def enc(x):
            x = float(x)
            return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")

        return {
            "epsilon": self.params.epsilon,
            "delta": self.params.delta,
            "delta_star": self.delta_star,
            "min_slack": enc(self.min_slack()),
            "kl_slack": enc(self.kl_slack),
            "renyi_slack": {str(k): enc(v) for k, v in self.renyi_slack.items()},
            "pure": {k: enc(v) for k, v in self.pure.items()},
            "alpha": self.alpha_grid.tolist(),
            "dh_slack": [enc(v) for v in self.dh_slack],
            "gamma": self.gamma_grid.tolist(),
            "egamma_slack": [enc(v) for v in self.egamma_slack],
            "egamma_slack_reverse": [enc(v) for v in self.egamma_slack_reverse],
        }


def dominance_audit(
    pair: StatePair,
    p: PrivacyParams,
    alpha_grid=None,
    gamma_grid=None,
    renyi_orders=(0.5, 2.0),
) -> DominanceReport:
    """Check every dominance inequality the weakest pair imposes on a DP pair.

    Where a divergence of the weakest pair is infinite (for example Rényi
    orders above 1 when δ > 0) the slack is infinite.

    Raises:
        NotDP: if ``pair`` is not (ε, δ)-DP.
    """
    pair, p = _pair(pair), _params(p)
    cert = certify_dp(pair, p)
    if not cert.is_dp:
        raise NotDP(f"pair needs delta >= {cert.delta_star:.6g} at eps={p.epsilon}")
    al = np.linspace(0, 1, 101) if alpha_grid is None else np.asarray(alpha_grid, dtype=float)
    gg = np.linspace(0, p.e + 2.0, 50) if gamma_grid is None else np.asarray(gamma_grid, dtype=float)
    weak = weakest_pair(p)

    f = f_tradeoff(p, al)
    with np.errstate(divide="ignore"):
        upper = np.where(f > 0, -np.log(np.where(f > 0, f, 1.0)), np.inf)
    dh = np.asarray(hyp_test_div(pair, al), dtype=float)
    dh_slack = np.full_like(al, np.inf)
    fin = np.isfinite(upper)
    dh_slack[fin] = upper[fin] - dh[fin]

    eg = weak.hockey_stick(gg) - pair.hockey_stick(gg)
    eg_rev = weak.swapped().hockey_stick(gg) - pair.swapped().hockey_stick(gg)

    ws = _weakest_scalars(p.epsilon, p.delta)
    kl_slack = _slack(ws["kl"], relative_entropy(pair))
    renyi_slack = {}
    for a in renyi_orders:
        up = ws[a] if a in ws else _weakest_renyi(weak, a)
        if math.isinf(up):
            renyi_slack[a] = math.inf
            continue
        try:
            val = renyi_hockey(pair, a)
        except DomainViolation:
            val = math.inf
        renyi_slack[a] = _slack(up, val)

    pure = {}
    if p.delta == 0:
        t = math.tanh(p.epsilon / 2.0)
        pure["kl_vs_eps_tanh"] = p.epsilon * t - relative_entropy(pair)
        pure["trace_norm_vs_2tanh"] = 2.0 * t - trace_norm(pair.rho.matrix - pair.sigma.matrix)
    return DominanceReport(p, cert.delta_star, al, dh_slack, gg, eg, eg_rev, kl_slack, renyi_slack, pure)


def _weakest_renyi(weak: StatePair, a: float) -> float:
    try:
        return renyi_hockey(weak, a)
    except DomainViolation:
        return math.inf


def mix_toward(pair: StatePair, lam: float) -> StatePair:
    """Pull both states toward their midpoint: ``ρ_λ = (1−λ)ρ + λ m``, ``m = (ρ+σ)/2``."""
    mid = 0.5 * (pair.rho.matrix + pair.sigma.matrix)
    return StatePair((1 - lam) * pair.rho.matrix + lam * mid, (1 - lam) * pair.sigma.matrix + lam * mid)


def make_dp(pair: StatePair, p: PrivacyParams, iterations: int = 60) -> StatePair:
    """Mix a pair toward itself just enough to make it (ε, δ)-DP.

    Bisects on the mixing weight λ ∈ [0, 1] of :func:`mix_toward`; λ = 1
    gives identical states, which are DP for every parameter. The returned
    pair sits at or just inside the DP boundary.
    """
    pair, p = _pair(pair), _params(p)
    if certify_dp(pair, p).is_dp:
        return pair
    rho, sigma = pair.rho.matrix, pair.sigma.matrix
    diff = rho - sigma
    e = p.e

    def tight_delta(lam: float) -> float:
        # ρ_λ − e^ε σ_λ = (1 − e^ε) m + (1 − λ)(1 + e^ε)(ρ − σ)/2 with m the midpoint
        mid = 0.5 * (rho + sigma)
        half = 0.5 * (1 - lam) * diff
        w1 = np.linalg.eigvalsh((1 - e) * mid + (1 + e) * half)
        w2 = np.linalg.eigvalsh((1 - e) * mid - (1 + e) * half)
        return max(w1[w1 > 0].sum(), w2[w2 > 0].sum())

    lo, hi = 0.0, 1.0
    for _ in range(iterations):
        mid_lam = 0.5 * (lo + hi)
        if tight_delta(mid_lam) <= p.delta:
            hi = mid_lam
        else:
            lo = mid_lam
    out = mix_toward(pair, hi)
    while not certify_dp(out, p).is_dp and hi < 1.0:
        hi = min(1.0, hi + 1e-12)
        out = mix_toward(pair, hi)
    return out
