"""Privatized inference on the mixture family ``ρ_θ = θρ + (1−θ)σ``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .divergence import StatePair, _pair, type2_error
from .dpcert import PrivacyParams, _params, certify_dp, weakest_pair
from .errors import NotDP, RangeError, SupportDegeneracy
from .linop import TOL_SUPP, DensityOperator


@dataclass
class TradeoffCurve:
    """A sampled curve ``y(x)``: ``(alpha, beta)``, ``(gamma, e_gamma)``, ``(theta, J)`` and so on."""

    x: np.ndarray
    y: np.ndarray
    x_label: str = "alpha"
    y_label: str = "beta"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)

    def is_monotone(self, increasing: bool = False, tol: float = 1e-10) -> bool:
        d = np.diff(self.y)
        return bool(np.all(d >= -tol) if increasing else np.all(d <= tol))

    def is_convex(self, tol: float = 1e-9) -> bool:
        """Discrete convexity: slopes between consecutive samples never decrease."""
        if self.x.size < 3:
            return True
        finite = np.isfinite(self.y)
        x, y = self.x[finite], self.y[finite]
        slopes = np.diff(y) / np.diff(x)
        return bool(np.all(np.diff(slopes) >= -tol * max(1.0, np.max(np.abs(slopes), initial=0.0))))

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))


def mix(pair: StatePair, theta: float) -> DensityOperator:
    """``θρ + (1−θ)σ`` for ``θ ∈ [0, 1]``."""
    pair = _pair(pair)
    if not (0.0 <= theta <= 1.0):
        raise RangeError(f"theta must lie in [0, 1], got {theta!r}")
    return DensityOperator(theta * pair.rho.matrix + (1 - theta) * pair.sigma.matrix)


def sld_fisher(pair: StatePair, theta: float) -> float:
    """SLD Fisher information of the mixture family at ``θ``.

    In the eigenbasis ``{λ_i}`` of ``ρ_θ``, with ``D = ρ − σ``,
    ``J_θ = Σ_{ij} 2 |D_ij|² / (λ_i + λ_j)`` over ``λ_i + λ_j > TOL_SUPP``.

    Raises:
        RangeError: for θ outside (0, 1).
        SupportDegeneracy: if ``D`` has weight where ``λ_i + λ_j`` vanishes.
    """
    pair = _pair(pair)
    if not (0.0 < theta < 1.0):
        raise RangeError(f"theta must lie in (0, 1), got {theta!r}")
    rt = mix(pair, theta)
    lam, v = rt.eigenvalues, rt.eigenvectors
    d = v.conj().T @ (pair.rho.matrix - pair.sigma.matrix) @ v
    s = lam[:, None] + lam[None, :]
    w = np.abs(d) ** 2
    live = s > TOL_SUPP
    if np.any(w[~live] > TOL_SUPP**2):
        raise SupportDegeneracy("derivative has weight outside the support of rho_theta")
    return float(np.sum(2.0 * w[live] / s[live]))


def fisher_max(p: PrivacyParams, theta: float) -> float:
    """Largest SLD Fisher information of the mixture family over (ε, δ)-DP pairs.

    ``δ/(θ(1−θ)) + (1−δ)(1−e^ε)²/(e^ε + (1−e^ε)² θ(1−θ))``.
    """
    p = _params(p)
    if not (0.0 < theta < 1.0):
        raise RangeError(f"theta must lie in (0, 1), got {theta!r}")
    v = theta * (1 - theta)
    c = math.expm1(p.epsilon) ** 2
    return p.delta / v + (1 - p.delta) * c / (p.e + c * v)


def fisher_curve(p: PrivacyParams, thetas) -> TradeoffCurve:
    th = np.asarray(thetas, dtype=float)
    return TradeoffCurve(th, [fisher_max(p, t) for t in th], "theta", "fisher_max")


def complementary_beta(pair: StatePair, theta0: float, theta1: float, alpha):
    """``β^c(α | ρ_{θ1} ‖ ρ_{θ0}) = 1 − β(α | ρ_{θ1} ‖ ρ_{θ0})``."""
    pair = _pair(pair)
    sub = StatePair(mix(pair, theta1), mix(pair, theta0))
    return 1.0 - np.asarray(type2_error(sub, alpha), dtype=float)


def privatized_beta_curve(
    pair: StatePair, theta0: float, theta1: float, alpha_grid, p: PrivacyParams
) -> TradeoffCurve:
    """Complementary type-II curve of the θ-mixtures and its slack to the weakest pair.

    ``meta["slack"]`` holds ``β^c_weakest(α) − β^c_pair(α)``, which is
    nonnegative for every (ε, δ)-DP pair.

    Raises:
        NotDP: if ``pair`` is not (ε, δ)-DP.
        RangeError: if ``θ0 > θ1`` or either lies outside [0, 1].
    """
    pair, p = _pair(pair), _params(p)
    if theta0 > theta1:
        raise RangeError("need theta0 <= theta1")
    cert = certify_dp(pair, p)
    if not cert.is_dp:
        raise NotDP(f"pair needs delta >= {cert.delta_star:.6g} at eps={p.epsilon}")
    al = np.asarray(alpha_grid, dtype=float)
    mine = complementary_beta(pair, theta0, theta1, al)
    best = complementary_beta(weakest_pair(p), theta0, theta1, al)
    return TradeoffCurve(
        al, mine, "alpha", "beta_c", {"weakest": best, "slack": best - mine, "theta0": theta0, "theta1": theta1}
    )
