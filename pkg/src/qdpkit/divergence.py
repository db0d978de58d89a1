"""Quantum divergences on pairs of density operators.

Everything is in nats. Infinite divergences are returned as ``math.inf``.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate

from ._numerics import golden_section_max, integrate_segments
from .errors import (
    DimMismatch,
    DomainViolation,
    InvalidParams,
    OrthogonalStates,
    SingularG,
    SupportViolation,
)
from .linop import (
    TOL_SUPP,
    DensityOperator,
    apply_spectral,
    matrix_log_on_support,
    support_contains,
    trace_norm,
)

# Type-II errors below this are indistinguishable from zero in double precision.
BETA_FLOOR = 1e-14


class StatePair:
    """An ordered pair ``(ρ, σ)`` with a thread-safe cache of ``spec(ρ − γσ)``."""

    def __init__(self, rho, sigma):
        self.rho = rho if isinstance(rho, DensityOperator) else DensityOperator(rho)
        self.sigma = sigma if isinstance(sigma, DensityOperator) else DensityOperator(sigma)
        if self.rho.dim != self.sigma.dim:
            raise DimMismatch(f"dimensions differ: {self.rho.dim} vs {self.sigma.dim}")
        self._cache: dict[float, np.ndarray] = {}
        self._lock = threading.Lock()
        self._breaks: np.ndarray | None = None

    def __repr__(self) -> str:
        return f"StatePair(dim={self.dim})"

    @property
    def dim(self) -> int:
        return self.rho.dim

    def swapped(self) -> "StatePair":
        return StatePair(self.sigma, self.rho)

    def commuting(self, tol: float = 1e-12) -> bool:
        a, b = self.rho.matrix, self.sigma.matrix
        return bool(np.max(np.abs(a @ b - b @ a)) <= tol)

    def eigs_at(self, gamma: float) -> np.ndarray:
        """Eigenvalues of ``ρ − γσ`` (memoised per γ)."""
        g = float(gamma)
        with self._lock:
            hit = self._cache.get(g)
        if hit is None:
            hit = np.linalg.eigvalsh(self.rho.matrix - g * self.sigma.matrix)
            with self._lock:
                if len(self._cache) > 4096:
                    self._cache.clear()
                self._cache[g] = hit
        return hit

    def hockey_stick(self, gamma):
        """``E_γ(ρ‖σ)`` for a scalar or an array of γ."""
        g = np.asarray(gamma, dtype=float)
        if g.ndim == 0:
            w = self.eigs_at(float(g))
            return float(np.sum(w[w > 0]))
        w = np.linalg.eigvalsh(self.rho.matrix[None] - g.reshape(-1, 1, 1) * self.sigma.matrix[None])
        return np.sum(np.clip(w, 0.0, None), axis=1).reshape(g.shape)

    def breakpoints(self) -> np.ndarray:
        """Finite positive γ at which ``ρ − γσ`` is singular (the kinks of ``E_γ``).

        Computed on ``supp(ρ+σ)`` where the pencil is regular: if ``μ`` is an
        eigenvalue of ``S^{-1/2} ρ S^{-1/2}`` with ``S = ρ + σ`` then
        ``γ = μ / (1 − μ)``.
        """
        if self._breaks is None:
            s = self.rho.matrix + self.sigma.matrix
            w, v = np.linalg.eigh(s)
            keep = w > TOL_SUPP
            inv_sqrt = (v[:, keep] / np.sqrt(w[keep]))
            m = inv_sqrt.conj().T @ self.rho.matrix @ inv_sqrt
            mu = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
            mu = mu[(mu > 1e-13) & (mu < 1 - 1e-13)]
            self._breaks = np.unique(mu / (1.0 - mu))
        return self._breaks


def _pair(pair) -> StatePair:
    if isinstance(pair, StatePair):
        return pair
    rho, sigma = pair
    return StatePair(rho, sigma)


def hockey_stick_q(pair: StatePair, gamma):
    """Quantum hockey-stick divergence ``E_γ(ρ‖σ) = Tr(ρ − γσ)_+``."""
    pair = _pair(pair)
    if np.any(np.asarray(gamma) < 0):
        raise InvalidParams("gamma must be nonnegative")
    return pair.hockey_stick(gamma)


def hockey_stick_variational(pair: StatePair, gamma: float) -> tuple[float, np.ndarray]:
    """Optimal test for ``max_{0 ≤ Λ ≤ I} Tr[Λ(ρ − γσ)]``: the positive-part projector."""
    pair = _pair(pair)
    w, v = np.linalg.eigh(pair.rho.matrix - gamma * pair.sigma.matrix)
    vp = v[:, w > 0]
    lam = vp @ vp.conj().T
    return float(np.real(np.trace(lam @ (pair.rho.matrix - gamma * pair.sigma.matrix)))), lam


def dmax(pair: StatePair) -> float:
    """Max-relative entropy ``D_max(ρ‖σ) = log λ_max(σ^{-1/2} ρ σ^{-1/2})``."""
    pair = _pair(pair)
    if not support_contains(pair.sigma, pair.rho):
        return math.inf
    s = pair.sigma.power_on_support(-0.5)
    lam = float(np.linalg.eigvalsh(s @ pair.rho.matrix @ s)[-1])
    return math.log(lam) if lam > 0 else -math.inf


def _beta_dual(pair: StatePair, alpha: np.ndarray) -> np.ndarray:
    """``β(α) = max_{t ≥ 0} [1 − tα − Tr(σ − tρ)_+]`` for each α, by golden section."""
    rho, sigma = pair.rho.matrix, pair.sigma.matrix
    out = np.empty_like(alpha)
    zero = alpha <= 0
    if np.any(zero):
        out[zero] = 1.0 - float(np.real(np.trace(pair.rho.kernel_projector() @ sigma)))
    one = alpha >= 1
    out[one] = 0.0
    work = ~(zero | one)
    if np.any(work):
        a = alpha[work]
        dm = dmax(pair.swapped())
        t_hi = 1.0 / a
        if math.isfinite(dm):
            t_hi = np.minimum(t_hi, math.exp(dm) + 1.0)

        def objective(t):
            w = np.linalg.eigvalsh(sigma[None] - t.reshape(-1, 1, 1) * rho[None])
            return 1.0 - t * a - np.sum(np.clip(w, 0.0, None), axis=1)

        _, best = golden_section_max(objective, np.zeros_like(a), t_hi)
        out[work] = best
    return np.clip(out, 0.0, 1.0)


def type2_error(pair: StatePair, alpha):
    """Minimum type-II error ``β(α|ρ‖σ)``; accepts a scalar or an array."""
    pair = _pair(pair)
    a = np.asarray(alpha, dtype=float)
    if np.any((a < 0) | (a > 1)):
        raise InvalidParams("alpha must lie in [0, 1]")
    beta = _beta_dual(pair, a.reshape(-1)).reshape(a.shape)
    return float(beta) if beta.ndim == 0 else beta


def hyp_test_div(pair: StatePair, alpha):
    """Hypothesis-testing divergence ``D_H^α(ρ‖σ) = −log β(α|ρ‖σ)``.

    Returns ``inf`` where β vanishes (below ``BETA_FLOOR``).
    """
    beta = np.asarray(type2_error(pair, alpha), dtype=float)
    with np.errstate(divide="ignore"):
        d = np.where(beta <= BETA_FLOOR, np.inf, -np.log(np.maximum(beta, BETA_FLOOR)))
    return float(d) if d.ndim == 0 else d


def relative_entropy(pair: StatePair) -> float:
    """Umegaki relative entropy ``Tr ρ(log ρ − log σ)``; ``inf`` unless ``ρ ≪ σ``."""
    pair = _pair(pair)
    if not support_contains(pair.sigma, pair.rho):
        return math.inf
    val = np.real(
        np.trace(pair.rho.matrix @ (matrix_log_on_support(pair.rho) - matrix_log_on_support(pair.sigma)))
    )
    return float(max(val, 0.0))


def _kernel_leak(pair: StatePair) -> float:
    """``Tr[Π_{ker σ} ρ]``, the limit of ``E_γ(ρ‖σ)`` as γ → ∞."""
    return float(np.real(np.trace(pair.sigma.kernel_projector() @ pair.rho.matrix)))


def _probe_integrable(func: Callable[[float], float], a: float, b: float) -> bool:
    """Heuristic check that ``∫_a^b func`` is finite (``b`` may be infinite)."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(func, a, b, limit=200)
        except (integrate.IntegrationWarning, ZeroDivisionError, OverflowError):
            return False
    return math.isfinite(val) and abs(val) < 1e12


def _upper_term(pair: StatePair, weight: Callable[[float], float], tail_integrable) -> float:
    """``∫_1^∞ weight(γ) E_γ(ρ‖σ) dγ``; ``inf`` when it diverges."""
    dm = dmax(pair)
    breaks = pair.breakpoints()
    if math.isfinite(dm):
        top = max(1.0, math.exp(dm))
        return integrate_segments(lambda g: weight(g) * pair.hockey_stick(g), 1.0, top, breaks)
    if _kernel_leak(pair) > TOL_SUPP:
        ok = tail_integrable if tail_integrable is not None else _probe_integrable(weight, 1.0, math.inf)
        if not ok:
            return math.inf
    top = max([1.0, *breaks]) + 1.0
    body = integrate_segments(lambda g: weight(g) * pair.hockey_stick(g), 1.0, top, breaks)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        tail, _ = integrate.quad(lambda g: weight(g) * pair.hockey_stick(g), top, math.inf, limit=200)
    return body + tail


def _lower_term(pair: StatePair, weight_u: Callable[[float], float], head_integrable) -> float:
    """``∫_0^1 weight_u(u) E_{1/u}(σ‖ρ) du``, the reversed term after ``u = 1/γ``."""
    rev = pair.swapped()
    dm = dmax(rev)
    breaks = 1.0 / rev.breakpoints() if rev.breakpoints().size else np.empty(0)

    def integrand(u):
        return weight_u(u) * rev.hockey_stick(1.0 / u)

    if math.isfinite(dm):
        lo = min(1.0, math.exp(-dm))
        return integrate_segments(integrand, lo, 1.0, breaks)
    if _kernel_leak(rev) > TOL_SUPP:
        ok = head_integrable if head_integrable is not None else _probe_integrable(weight_u, 0.0, 1.0)
        if not ok:
            return math.inf
    return integrate_segments(integrand, 0.0, 1.0, breaks)


def relative_entropy_integral(pair: StatePair) -> float:
    """Relative entropy from ``∫_1^∞ [E_γ(ρ‖σ)/γ + E_γ(σ‖ρ)/γ²] dγ``."""
    pair = _pair(pair)
    if not support_contains(pair.sigma, pair.rho):
        return math.inf
    return _upper_term(pair, lambda g: 1.0 / g, False) + _lower_term(pair, lambda u: 1.0, True)


@dataclass(frozen=True)
class FWeight:
    """Second derivative ``f''`` of a convex ``f`` with ``f(1) = 0``.

    ``tail_integrable`` states whether ``∫_1^∞ f''`` is finite and
    ``head_integrable`` whether ``∫_0^1 u f''(u) du`` is finite; ``None`` means
    probe numerically.
    """

    f_second_derivative: Callable[[float], float]
    description: str = "custom"
    tail_integrable: bool | None = None
    head_integrable: bool | None = None

    def __call__(self, x: float) -> float:
        return self.f_second_derivative(x)

    @classmethod
    def kl(cls) -> "FWeight":
        return cls(lambda x: 1.0 / x, "x log x", False, True)

    @classmethod
    def chi_squared(cls) -> "FWeight":
        return cls(lambda x: 2.0, "(x-1)^2", False, True)

    @classmethod
    def squared_hellinger(cls) -> "FWeight":
        # f(x) = (1 - sqrt x)^2  =>  f'' = x^{-3/2} / 2
        return cls(lambda x: 0.5 * x**-1.5, "(1-sqrt x)^2", True, True)

    @classmethod
    def power(cls, alpha: float) -> "FWeight":
        """``f(x) = (x^α − 1)/(α − 1)``, whose divergence is the Hellinger-type ``H_α``."""
        if alpha <= 0 or alpha == 1:
            raise InvalidParams("alpha must be positive and different from 1")
        return cls(lambda x: alpha * x ** (alpha - 2.0), f"(x^{alpha}-1)/({alpha}-1)", alpha < 1, True)


def f_divergence(pair: StatePair, f: FWeight) -> float:
    """``D_f(ρ‖σ) = ∫_1^∞ [f''(γ) E_γ(ρ‖σ) + γ^{-3} f''(1/γ) E_γ(σ‖ρ)] dγ``."""
    pair = _pair(pair)
    up = _upper_term(pair, f.f_second_derivative, f.tail_integrable)
    if math.isinf(up):
        return math.inf
    low = _lower_term(pair, lambda u: u * f.f_second_derivative(u), f.head_integrable)
    return up + low


def orthogonal(pair: StatePair) -> bool:
    """``ρ ⊥ σ`` iff ``Tr[Π_ρ σ] ≤ TOL_SUPP``."""
    pair = _pair(pair)
    return float(np.real(np.trace(pair.rho.support_projector() @ pair.sigma.matrix))) <= TOL_SUPP


def renyi_hockey(pair: StatePair, alpha: float) -> float:
    """Rényi divergence built from hockey-stick integrals.

    ``H_α = α ∫_1^∞ [γ^{α−2} E_γ(ρ‖σ) + γ^{−α−1} E_γ(σ‖ρ)] dγ`` and
    ``D_α = log(1 + (α−1) H_α)/(α−1)``. At ``α = 0`` the limit
    ``−log Tr[Π_ρ σ]`` is returned.

    Raises:
        DomainViolation: unless (α < 1 and ρ, σ not orthogonal) or ρ ≪ σ.
    """
    pair = _pair(pair)
    if alpha < 0 or alpha == 1 or not math.isfinite(alpha):
        raise InvalidParams("alpha must lie in [0, 1) or (1, inf)")
    supported = support_contains(pair.sigma, pair.rho)
    if not ((alpha < 1 and not orthogonal(pair)) or supported):
        raise DomainViolation(f"Renyi order {alpha} is undefined for this pair")
    if alpha == 0:
        mass = float(np.real(np.trace(pair.rho.support_projector() @ pair.sigma.matrix)))
        return -math.log(mass) if mass > 0 else math.inf
    up = _upper_term(pair, lambda g: g ** (alpha - 2.0), alpha < 1)
    low = _lower_term(pair, lambda u: u ** (alpha - 1.0), True)
    h = alpha * (up + low)
    arg = 1.0 + (alpha - 1.0) * h
    if math.isinf(h):
        return math.inf
    if arg <= 0:
        return math.inf
    return max(math.log(arg) / (alpha - 1.0), 0.0)


def fidelity_norm(pair: StatePair) -> float:
    """``‖√ρ √σ‖₁`` (the root fidelity)."""
    pair = _pair(pair)
    sv = np.linalg.svd(pair.rho.sqrt() @ pair.sigma.sqrt(), compute_uv=False)
    return float(np.sum(sv))


def measured_renyi_half(pair: StatePair, convention: str = "standard") -> float:
    """Measured Rényi divergence of order 1/2.

    ``convention="standard"`` returns ``−2 log ‖√ρ√σ‖₁``, which equals the
    classical Rényi-1/2 divergence for commuting states.
    ``convention="half"`` returns ``−½ log ‖√ρ√σ‖₁``, the coefficient that
    also circulates in the literature for this identity.

    Raises:
        OrthogonalStates: if ``‖√ρ√σ‖₁`` vanishes.
    """
    coeff = {"standard": -2.0, "half": -0.5}.get(convention)
    if coeff is None:
        raise InvalidParams("convention must be 'standard' or 'half'")
    f = fidelity_norm(pair)
    if f <= TOL_SUPP:
        raise OrthogonalStates("states are orthogonal")
    return max(coeff * math.log(min(f, 1.0)), 0.0)


class SmoothTruncation(NamedTuple):
    rho_tilde: DensityOperator
    dmax_val: float
    l1_dist: float
    delta: float
    dmax_bound: float
    l1_bound: float


def smooth_truncate(pair: StatePair, eps: float) -> SmoothTruncation:
    """Smooth ``ρ`` into ``ρ̃ = GρG†/Tr[GρG†]`` with ``D_max(ρ̃‖σ) ≤ ε − log(1−δ)``.

    ``G = (e^ε σ)^{1/2} (e^ε σ + (ρ − e^ε σ)_+)^{-1/2}`` and ``δ = E_{e^ε}(ρ‖σ)``.
    ``l1_dist`` is the trace distance ``½‖ρ − ρ̃‖₁``; it is at most
    ``sqrt(δ(2−δ))``.
    """
    pair = _pair(pair)
    if eps < 0 or not math.isfinite(eps):
        raise InvalidParams("epsilon must be finite and nonnegative")
    e = math.exp(eps)
    rho, sigma = pair.rho.matrix, pair.sigma.matrix
    delta = pair.hockey_stick(e)
    if delta >= 1.0 - TOL_SUPP:
        raise SingularG("E_{e^eps}(rho||sigma) is 1; no smoothing is possible")
    w, v = np.linalg.eigh(rho - e * sigma)
    pos = (v * np.clip(w, 0.0, None)) @ v.conj().T
    m = e * sigma + pos
    mw, mv = np.linalg.eigh(0.5 * (m + m.conj().T))
    keep = mw > TOL_SUPP
    if keep.any() and mw[keep].min() / mw.max() < 1e-13:
        raise SingularG("inverse square root is ill-conditioned")
    m_inv_sqrt = apply_spectral(mw, mv, lambda x: x**-0.5, keep)
    sw, sv = np.linalg.eigh(e * sigma)
    s_sqrt = apply_spectral(sw, sv, np.sqrt, sw > 0)
    g = s_sqrt @ m_inv_sqrt
    out = g @ rho @ g.conj().T
    tr = float(np.real(np.trace(out)))
    if tr <= TOL_SUPP:
        raise SingularG("smoothed operator has vanishing trace")
    rho_t = DensityOperator(0.5 * (out + out.conj().T) / tr)
    return SmoothTruncation(
        rho_tilde=rho_t,
        dmax_val=dmax(StatePair(rho_t, pair.sigma)),
        l1_dist=0.5 * trace_norm(rho - rho_t.matrix),
        delta=delta,
        dmax_bound=eps - math.log(1.0 - delta),
        l1_bound=math.sqrt(delta * (2.0 - delta)),
    )


class MixtureBound(NamedTuple):
    bound_simple: float
    bound_tight: float


def mixture_kl_bound(
    rho, components: Sequence[tuple[float, DensityOperator]]
) -> MixtureBound:
    """Upper bounds on ``D(ρ‖Σ_b P(b) σ_b)``.

    ``bound_simple = min_b [D(ρ‖σ_b) − log P(b)]`` and
    ``bound_tight = −log Σ_b P(b) exp(−D(ρ‖σ_b))``.
    """
    rho = rho if isinstance(rho, DensityOperator) else DensityOperator(rho)
    if not components:
        raise InvalidParams("at least one mixture component is required")
    weights = np.array([float(w) for w, _ in components])
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-10:
        raise InvalidParams("mixture weights must be nonnegative and sum to 1")
    divs = []
    for w, s in components:
        d = relative_entropy(StatePair(rho, s))
        if math.isinf(d):
            raise SupportViolation("rho is not supported within every component")
        divs.append(d)
    divs = np.array(divs)
    live = weights > 0
    simple = float(np.min(divs[live] - np.log(weights[live])))
    tight = float(-np.log(np.sum(weights[live] * np.exp(-divs[live]))))
    return MixtureBound(simple, min(tight, simple))


class PinskerCheck(NamedTuple):
    lhs: float
    rhs: float


def reversed_pinsker_check(pair: StatePair) -> PinskerCheck:
    """``D(ρ‖σ) ≤ (2/λ_min(σ)) E_1(ρ‖σ)²`` with ``λ_min`` the smallest nonzero eigenvalue.

    Raises:
        SupportViolation: if ``supp ρ ⊄ supp σ``.
    """
    pair = _pair(pair)
    if not support_contains(pair.sigma, pair.rho):
        raise SupportViolation("supp(rho) is not contained in supp(sigma)")
    lam = float(pair.sigma.eigenvalues[pair.sigma.support_mask].min())
    e1 = pair.hockey_stick(1.0)
    return PinskerCheck(relative_entropy(pair), 2.0 / lam * e1 * e1)
