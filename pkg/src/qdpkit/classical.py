"""Finite classical distributions, classical divergences, the Neyman-Pearson
curve, the truncated pair and KL bounds for outputs of LDP kernels."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from ._numerics import integrate_segments
from .errors import (
    AlphabetMismatch,
    DegenerateTruncation,
    InvalidDistribution,
    InvalidParams,
    NotLDP,
    SupportViolation,
)
from .linop import TOL_SUPP, TOL_TRACE

TOL_LDP = 1e-10


@dataclass(frozen=True, eq=False)
class ClassicalDist:
    """Probability vector over a labelled finite alphabet."""

    alphabet: tuple
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise InvalidDistribution("probs must be a non-empty vector")
        if len(self.alphabet) != probs.size:
            raise AlphabetMismatch(
                f"alphabet has {len(self.alphabet)} labels but probs has {probs.size} entries"
            )
        if len(set(self.alphabet)) != len(self.alphabet):
            raise AlphabetMismatch("alphabet labels must be distinct")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise InvalidDistribution("probabilities must be finite and nonnegative")
        if abs(probs.sum() - 1.0) > TOL_TRACE:
            raise InvalidDistribution(f"probabilities sum to {probs.sum()!r}, not 1")
        probs = probs.copy()
        probs.setflags(write=False)
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "probs", probs)

    @classmethod
    def of(cls, probs, alphabet: Sequence | None = None) -> "ClassicalDist":
        probs = np.asarray(probs, dtype=float)
        if alphabet is None:
            alphabet = range(probs.size)
        return cls(tuple(alphabet), probs)

    def __len__(self) -> int:
        return self.probs.size

    def __repr__(self) -> str:
        return f"ClassicalDist({dict(zip(self.alphabet, self.probs.tolist()))})"

    @property
    def support(self) -> np.ndarray:
        return self.probs > TOL_SUPP

    def to_json(self) -> dict:
        return {"alphabet": list(self.alphabet), "probs": self.probs.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "ClassicalDist":
        try:
            probs = obj["probs"]
        except (KeyError, TypeError) as exc:
            raise InvalidDistribution(f"malformed distribution JSON: {exc}") from exc
        return cls.of(probs, obj.get("alphabet"))


def _as_dist(p) -> ClassicalDist:
    return p if isinstance(p, ClassicalDist) else ClassicalDist.of(p)


def _pair(P, Q) -> tuple[np.ndarray, np.ndarray]:
    P, Q = _as_dist(P), _as_dist(Q)
    if P.alphabet != Q.alphabet:
        raise AlphabetMismatch("distributions are defined over different alphabets")
    return P.probs, Q.probs


@dataclass(frozen=True, eq=False)
class MarkovKernel:
    """Row-stochastic matrix; ``rows[x]`` is the output distribution for input ``x``."""

    rows: np.ndarray
    in_alphabet: tuple = ()
    out_alphabet: tuple = ()

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.size == 0:
            raise InvalidDistribution("kernel rows must form a non-empty matrix")
        if not np.all(np.isfinite(rows)) or np.any(rows < 0):
            raise InvalidDistribution("kernel entries must be finite and nonnegative")
        if np.any(np.abs(rows.sum(axis=1) - 1.0) > TOL_TRACE):
            raise InvalidDistribution("every kernel row must sum to 1")
        ins = tuple(self.in_alphabet) or tuple(range(rows.shape[0]))
        outs = tuple(self.out_alphabet) or tuple(range(rows.shape[1]))
        if len(ins) != rows.shape[0] or len(outs) != rows.shape[1]:
            raise AlphabetMismatch("kernel alphabets do not match its shape")
        rows = rows.copy()
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "in_alphabet", ins)
        object.__setattr__(self, "out_alphabet", outs)

    def apply(self, P) -> ClassicalDist:
        P = _as_dist(P)
        if P.alphabet != self.in_alphabet:
            raise AlphabetMismatch("input distribution alphabet does not match the kernel")
        out = P.probs @ self.rows
        return ClassicalDist(self.out_alphabet, out / out.sum())

    def row(self, i: int) -> ClassicalDist:
        return ClassicalDist(self.out_alphabet, self.rows[i])

    def ldp_delta(self, eps: float) -> float:
        """Smallest δ for which every pair of rows is (eps, δ)-DP."""
        gamma = math.exp(eps)
        r = self.rows
        diff = r[:, None, :] - gamma * r[None, :, :]
        return float(np.max(np.sum(np.clip(diff, 0.0, None), axis=2)))

    def to_json(self) -> dict:
        return {"rows": self.rows.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "MarkovKernel":
        try:
            rows = obj["rows"]
        except (KeyError, TypeError) as exc:
            raise InvalidDistribution(f"malformed kernel JSON: {exc}") from exc
        return cls(rows, tuple(obj.get("in_alphabet", ())), tuple(obj.get("out_alphabet", ())))


def randomized_response(k: int, eps: float) -> MarkovKernel:
    """k-ary randomized response: keep the input with probability e^ε/(e^ε+k-1)."""
    if k < 2:
        raise InvalidParams("randomized response needs at least two symbols")
    e = math.exp(eps)
    rows = np.full((k, k), 1.0 / (e + k - 1))
    np.fill_diagonal(rows, e / (e + k - 1))
    return MarkovKernel(rows)


def hockey_stick_c(P, Q, gamma: float) -> float:
    """``E_γ(P‖Q) = Σ_x [P(x) − γ Q(x)]_+``."""
    p, q = _pair(P, Q)
    if gamma < 0:
        raise InvalidParams("gamma must be nonnegative")
    return float(np.sum(np.clip(p - gamma * q, 0.0, None)))


def np_beta_c(P, Q, alpha):
    """Minimum type-II error ``β(α|P‖Q)`` over randomized tests.

    The test rejects ``P`` on the symbols with the largest likelihood ratio
    ``Q/P`` first and randomizes on the boundary symbol. ``alpha`` may be a
    scalar or an array.
    """
    p, q = _pair(P, Q)
    a = np.asarray(alpha, dtype=float)
    if np.any((a < 0) | (a > 1)):
        raise InvalidParams("alpha must lie in [0, 1]")
    # symbols where P has no mass are rejected for free, so only p > 0 matters
    mask = p > 0
    pp, qq = p[mask], q[mask]
    order = np.argsort(-(qq / pp), kind="stable")
    pp, qq = pp[order], qq[order]
    cum_p = np.concatenate([[0.0], np.cumsum(pp)])
    # P sums to 1 up to rounding; a budget of alpha = 1 must reject every symbol
    cum_p[-1] = min(cum_p[-1], 1.0)
    # Q-mass still accepted after rejecting the first j symbols; summed from
    # the tail so that it is exactly 0 once everything is rejected
    kept_q = np.concatenate([np.cumsum(qq[::-1])[::-1], [0.0]])
    beta = np.clip(np.interp(np.minimum(a, cum_p[-1]), cum_p, kept_q), 0.0, 1.0)
    return float(beta) if beta.ndim == 0 else beta


def kl_c(P, Q) -> float:
    """Kullback-Leibler divergence in nats; ``inf`` if ``supp P ⊄ supp Q``."""
    p, q = _pair(P, Q)
    sp = p > 0
    if np.any(q[sp] <= 0):
        return math.inf
    return float(max(0.0, np.sum(p[sp] * np.log(p[sp] / q[sp]))))


def renyi_c(P, Q, alpha: float) -> float:
    """Classical Rényi divergence of order ``alpha`` (``alpha = 1`` gives KL)."""
    p, q = _pair(P, Q)
    if alpha < 0:
        raise InvalidParams("alpha must be nonnegative")
    if alpha == 1:
        return kl_c(P, Q)
    if alpha == 0:
        mass = q[p > 0].sum()
        return math.inf if mass <= 0 else float(-math.log(mass))
    if alpha > 1 and np.any(q[p > 0] <= 0):
        return math.inf
    both = (p > 0) & (q > 0)
    s = float(np.sum(p[both] ** alpha * q[both] ** (1.0 - alpha)))
    if s <= 0:
        return math.inf
    return math.log(s) / (alpha - 1.0)


def kl_c_integral(P, Q) -> float:
    """KL computed from the hockey-stick integral representation.

    ``D(P‖Q) = ∫_1^∞ [E_γ(P‖Q)/γ + E_γ(Q‖P)/γ²] dγ``. The second term is
    integrated in ``u = 1/γ`` over ``[0, 1]``. Kinks sit at the likelihood
    ratios, which are used as breakpoints.
    """
    p, q = _pair(P, Q)
    if np.any(q[p > 0] <= 0):
        return math.inf
    Pd, Qd = ClassicalDist.of(p), ClassicalDist.of(q)
    both = (p > 0) & (q > 0)
    ratios = p[both] / q[both]
    gmax = float(ratios.max()) if ratios.size else 1.0
    first = integrate_segments(
        lambda g: hockey_stick_c(Pd, Qd, g) / g, 1.0, max(1.0, gmax), ratios
    )
    second = integrate_segments(
        lambda u: hockey_stick_c(Qd, Pd, 1.0 / u) if u > 0 else float(q[p <= 0].sum()),
        0.0,
        1.0,
        ratios,
    )
    return first + second


def total_variation(P, Q) -> float:
    p, q = _pair(P, Q)
    return 0.5 * float(np.abs(p - q).sum())


def max_log_ratio(P, Q) -> float:
    """``max_x |log P(x)/Q(x)|`` over the union of supports (``inf`` on mismatch)."""
    p, q = _pair(P, Q)
    sp, sq = p > 0, q > 0
    if np.any(sp != sq):
        return math.inf
    if not sp.any():
        return 0.0
    return float(np.max(np.abs(np.log(p[sp] / q[sp]))))


class TruncatedPair(NamedTuple):
    P_tilde: ClassicalDist
    Q_tilde: ClassicalDist
    delta_eff: float


def truncate_pair(P, Q, eps: float) -> TruncatedPair:
    """Two-sided truncation distilling a pure-DP pair from an (ε, δ)-DP pair.

    ``P'(x) = min{P(x), e^ε Q(x)}`` and ``Q'(x) = min{Q(x), e^ε P(x)}``, each
    renormalised. ``delta_eff`` is the tight δ of ``(P, Q)`` at this ε.
    """
    P, Q = _as_dist(P), _as_dist(Q)
    p, q = _pair(P, Q)
    if eps < 0 or not math.isfinite(eps):
        raise InvalidParams("epsilon must be finite and nonnegative")
    e = math.exp(eps)
    p1 = np.minimum(p, e * q)
    q1 = np.minimum(q, e * p)
    zp, zq = p1.sum(), q1.sum()
    if zp <= TOL_SUPP or zq <= TOL_SUPP:
        raise DegenerateTruncation("truncation normaliser vanishes (delta_eff is 1)")
    delta_eff = max(1.0 - zp, 1.0 - zq, 0.0)
    return TruncatedPair(ClassicalDist(P.alphabet, p1 / zp), ClassicalDist(Q.alphabet, q1 / zq), delta_eff)


def truncation_min_mass(P, Q, trunc: TruncatedPair) -> float:
    """The minimum mass ``m`` over ``supp(P̃)`` used by the continuity bound."""
    p, q = _pair(P, Q)
    pt, qt = trunc.P_tilde.probs, trunc.Q_tilde.probs
    s = pt > 0
    if not s.any():
        return 0.0
    return float(np.min(np.minimum(np.minimum(pt[s], p[s]), np.minimum(qt[s], q[s]))))


@dataclass(frozen=True)
class TruncationReport:
    """Numerical certificates for the truncated pair's three guarantees."""

    eps: float
    delta_eff: float
    l1_P: float
    l1_Q: float
    max_log_ratio: float
    pure_level: float
    kl_original: float
    kl_truncated: float
    m: float
    kl_gap_bound: float

    @property
    def l1_ok(self) -> bool:
        tol = 1e-12
        return self.l1_P <= 2 * self.delta_eff + tol and self.l1_Q <= 2 * self.delta_eff + tol

    @property
    def pure_ok(self) -> bool:
        return self.max_log_ratio <= self.pure_level + 1e-12

    @property
    def kl_ok(self) -> bool:
        if math.isinf(self.kl_original):
            return False
        gap = abs(self.kl_original - self.kl_truncated)
        return gap <= self.kl_gap_bound + 1e-12

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d.update(l1_ok=self.l1_ok, pure_ok=self.pure_ok, kl_ok=self.kl_ok)
        return d


def truncation_report(P, Q, eps: float) -> tuple[TruncatedPair, TruncationReport]:
    """Truncate and evaluate every quantity in the truncation guarantees.

    The KL continuity term uses ``log 1/(1-δ)``. A variant with ``log 1/δ``
    appears in one derivation of the same bound; it is not used here.
    """
    trunc = truncate_pair(P, Q, eps)
    p, q = _pair(P, Q)
    d = trunc.delta_eff
    pure_level = eps + math.log(1.0 / (1.0 - d))
    m = truncation_min_mass(P, Q, trunc)
    if m <= TOL_SUPP:
        gap_bound = math.inf
    else:
        gap_bound = 2.0 * d * (pure_level + 2.0 / m)
    report = TruncationReport(
        eps=float(eps),
        delta_eff=d,
        l1_P=float(np.abs(trunc.P_tilde.probs - p).sum()),
        l1_Q=float(np.abs(trunc.Q_tilde.probs - q).sum()),
        max_log_ratio=max_log_ratio(trunc.P_tilde, trunc.Q_tilde),
        pure_level=pure_level,
        kl_original=kl_c(p, q),
        kl_truncated=kl_c(trunc.P_tilde.probs, trunc.Q_tilde.probs),
        m=m,
        kl_gap_bound=gap_bound,
    )
    return trunc, report


class KLBound(NamedTuple):
    bound_main: float
    bound_alt: float
    actual: float
    leading_term: float
    m: float


def kl_bound_ldp(K: MarkovKernel, P_X, Q_X, eps: float, delta: float) -> KLBound:
    """Both upper bounds on ``D(K(P_X)‖K(Q_X))`` for an (ε, δ)-LDP kernel.

    ``leading_term`` is ``½‖P_X − Q_X‖₁ ε tanh(ε/2)``, the part of the main
    bound that survives at δ = 0.

    Raises:
        NotLDP: if some pair of kernel rows violates (ε, δ)-DP.
        SupportViolation: if ``supp K(P_X) ⊄ supp K(Q_X)``.
    """
    if eps < 0 or not (0 <= delta < 1):
        raise InvalidParams("need eps >= 0 and delta in [0, 1)")
    worst = K.ldp_delta(eps)
    if worst > delta + TOL_LDP:
        raise NotLDP(f"kernel rows need delta >= {worst:.6g} at eps={eps}")
    PY, QY = K.apply(P_X), K.apply(Q_X)
    py, qy = PY.probs, QY.probs
    if np.any(qy[py > 0] <= 0):
        raise SupportViolation("supp K(P_X) is not contained in supp K(Q_X)")
    actual = kl_c(PY, QY)
    tv = 0.5 * float(np.abs(_as_dist(P_X).probs - _as_dist(Q_X).probs).sum())

    e = math.exp(eps)
    lg = math.log(1.0 / (1.0 - delta))
    leading = tv * eps * math.tanh(eps / 2.0)
    trunc = truncate_pair(PY, QY, eps)
    s = py > 0
    pt, qt = trunc.P_tilde.probs, trunc.Q_tilde.probs
    m = float(np.min(np.minimum(np.minimum(pt[s], py[s]), np.minimum(qt[s], qy[s]))))
    if m <= TOL_SUPP:
        inv_m = math.inf
    else:
        inv_m = 2.0 / m
    main = tv * (
        eps * math.tanh(eps / 2.0)
        + delta * (2.0 * eps / (e + 1.0) + (e - 1.0) / e + lg + delta / e)
    )
    tail = e / (1.0 - delta) + 2.0 * math.log(e / (1.0 - delta)) - (1.0 - delta) / e
    tail += 2.0 * (eps + lg + inv_m) if delta > 0 or math.isfinite(inv_m) else 0.0
    main += delta * tail
    eps_p = eps + lg
    alt = eps_p * math.tanh(eps_p / 2.0) + (2.0 * delta * (eps_p + inv_m) if delta > 0 else 0.0)
    return KLBound(float(main), float(alt), actual, float(leading), m)
