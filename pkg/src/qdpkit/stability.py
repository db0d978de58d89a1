"""Learning stability of differentially private quantum learners.

Bounds the Holevo information ``I[S;B]`` between an n-symbol training
sequence and the learner's output state. All logarithms are natural.
"""

from __future__ import annotations

import itertools
import math
import warnings
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .divergence import StatePair, mixture_kl_bound, relative_entropy
from .dpcert import PrivacyParams, _params, certify_dp
from .errors import AssumptionViolated, InvalidParams, LengthMismatch
from .linop import DensityOperator


@dataclass(frozen=True)
class Dataset:
    """A length-n sequence over a finite alphabet."""

    sequence: tuple
    alphabet: tuple

    def __post_init__(self):
        seq, alph = tuple(self.sequence), tuple(self.alphabet)
        if not seq:
            raise LengthMismatch("a dataset needs at least one symbol")
        if len(set(alph)) != len(alph):
            raise InvalidParams("alphabet labels must be distinct")
        stray = set(seq) - set(alph)
        if stray:
            raise InvalidParams(f"symbols {sorted(map(str, stray))} are not in the alphabet")
        object.__setattr__(self, "sequence", seq)
        object.__setattr__(self, "alphabet", alph)

    @property
    def n(self) -> int:
        return len(self.sequence)

    def type_counts(self) -> tuple:
        c = Counter(self.sequence)
        return tuple(c.get(a, 0) for a in self.alphabet)


def neighbor_distance(s: Dataset, s2: Dataset) -> int:
    """Type distance ``k = ½ Σ_a |N(a|s) − N(a|s′)|`` (0 for permutations).

    Raises:
        LengthMismatch: if the sequences differ in length or alphabet.
    """
    if s.n != s2.n:
        raise LengthMismatch(f"lengths differ: {s.n} vs {s2.n}")
    if set(s.alphabet) != set(s2.alphabet):
        raise LengthMismatch("datasets use different alphabets")
    a, b = Counter(s.sequence), Counter(s2.sequence)
    total = sum(abs(a.get(x, 0) - b.get(x, 0)) for x in s.alphabet)
    return total // 2


def g_k(k: int, p: PrivacyParams) -> float:
    """Group-privacy factor ``δ (e^{kε} − 1)/(e^ε − 1)``; ``kδ`` at ε = 0.

    Emits a ``RuntimeWarning`` when the value reaches 1.
    """
    p = _params(p)
    if k < 1 or int(k) != k:
        raise InvalidParams("k must be a positive integer")
    if p.delta == 0:
        return 0.0
    if p.epsilon == 0:
        val = k * p.delta
    else:
        # expm1 keeps precision for small ε; overflow becomes inf
        with np.errstate(over="ignore"):
            val = float(p.delta * np.expm1(k * p.epsilon) / math.expm1(p.epsilon))
    if val >= 1:
        warnings.warn(f"g_{k} = {val:.4g} >= 1; group-privacy guarantee is vacuous", RuntimeWarning, stacklevel=2)
    return val


def h_term(n: int, alphabet_size: int, p: PrivacyParams, m: float) -> float:
    """``log 1/(1−g) + (2/m) g`` with ``g = g_{n(|Z|−1)}(ε, δ)``.

    Raises:
        AssumptionViolated: if ``g ≥ 1``.
    """
    p = _params(p)
    k = n * (alphabet_size - 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        g = g_k(k, p) if k >= 1 else 0.0
    if g >= 1:
        raise AssumptionViolated(f"g_{k}(eps, delta) = {g:.6g} must be < 1")
    return math.log(1.0 / (1.0 - g)) + 2.0 / m * g


@dataclass
class StabilityReport:
    n: int
    alphabet_size: int
    epsilon: float
    delta: float
    m: float
    regime: str
    g: float
    h: float | None
    bound: float
    candidates: dict = field(default_factory=dict)
    holevo: float | None = None

    def to_json(self) -> dict:
        return asdict(self)


def _check_inputs(n: int, alphabet_size: int, m: float):
    if n < 1 or alphabet_size < 1:
        raise InvalidParams("need n >= 1 and alphabet_size >= 1")
    if not (0 < m <= 1):
        raise InvalidParams("m must lie in (0, 1]")


def stability_report(n: int, alphabet_size: int, p: PrivacyParams, m: float) -> StabilityReport:
    """Evaluate the Holevo-information bound for the ε regime of ``p``.

    Regimes: ``ε < 1/n`` gives ``(|Z|−1) ε n + h``; ``1/n ≤ ε ≤ 1`` gives
    ``(|Z|−1) log(n e ε) + h``; ``ε > 1`` gives ``(|Z|−1) log(n+1)``.
    At ``ε = 1/n`` and ``ε = 1`` both adjacent formulas apply and the
    smaller is returned.

    Raises:
        AssumptionViolated: if an h-dependent formula is required and
            ``g_{n(|Z|−1)}(ε, δ) ≥ 1``.
    """
    p = _params(p)
    _check_inputs(n, alphabet_size, m)
    eps, z1 = p.epsilon, alphabet_size - 1
    k = n * z1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        g = g_k(k, p) if k >= 1 else 0.0
    small = eps <= 1.0 / n
    moderate = 1.0 / n <= eps <= 1.0
    large = eps >= 1.0
    cands: dict[str, float] = {}
    h = None
    needs_h = (small or moderate) and not large
    if small or moderate:
        try:
            h = h_term(n, alphabet_size, p, m)
        except AssumptionViolated:
            if needs_h:
                raise
    if h is not None:
        if small:
            cands["small"] = z1 * eps * n + h
        if moderate:
            cands["moderate"] = z1 * math.log(n * math.e * eps) + h if eps > 0 else math.inf
    if large:
        cands["large"] = z1 * math.log(n + 1)
    regime = min(cands, key=cands.get)
    return StabilityReport(n, alphabet_size, eps, p.delta, m, regime, g, h, cands[regime], cands)


def stability_bound(n: int, alphabet_size: int, p: PrivacyParams, m: float) -> float:
    """Upper bound on ``I[S;B]``; see :func:`stability_report`."""
    return stability_report(n, alphabet_size, p, m).bound


@dataclass(frozen=True)
class CQEnsemble:
    """Classical-quantum ensemble ``{(p_s, ρ_s)}``."""

    entries: tuple

    def __post_init__(self):
        ents = [(float(w), r if isinstance(r, DensityOperator) else DensityOperator(r)) for w, r in self.entries]
        if not ents:
            raise InvalidParams("ensemble is empty")
        ws = np.array([w for w, _ in ents])
        if np.any(ws < 0) or abs(ws.sum() - 1) > 1e-10:
            raise InvalidParams("ensemble weights must be nonnegative and sum to 1")
        if len({r.dim for _, r in ents}) != 1:
            raise InvalidParams("ensemble states must share one dimension")
        object.__setattr__(self, "entries", tuple(ents))

    def average(self) -> DensityOperator:
        m = sum(w * r.matrix for w, r in self.entries)
        return DensityOperator(m / np.real(np.trace(m)))


def holevo(ensemble: CQEnsemble) -> float:
    """``S(Σ p_s ρ_s) − Σ p_s S(ρ_s)`` in nats."""
    avg = ensemble.average().entropy()
    inner = sum(w * r.entropy() for w, r in ensemble.entries)
    return max(0.0, avg - inner)


def type_census(n: int, d: int) -> int:
    """Number of types of length-n sequences over d symbols, ``C(n+d−1, d−1)``."""
    if n < 1 or d < 1:
        raise InvalidParams("need n >= 1 and d >= 1")
    count = math.comb(n + d - 1, d - 1)
    if count > (n + 1) ** (d - 1):
        raise AssertionError("type count exceeds (n+1)^(d-1)")
    return count


class ToyLearner:
    """Binary-alphabet learner whose output depends only on the count of ones.

    For ``k`` ones out of ``n`` it emits ``ω_k = (1 − k/n) A + (k/n) B`` with
    ``A = (1−c) I/2 + c|0><0|`` and ``B = (1−c) I/2 + c|+><+|``. All outputs
    have full support, so the learner is support-consistent by design.
    """

    def __init__(self, n: int, contrast: float = 0.3):
        if n < 1 or not (0 < contrast < 1):
            raise InvalidParams("need n >= 1 and contrast in (0, 1)")
        self.n = n
        self.contrast = contrast
        c = contrast
        zero = np.array([[1.0, 0.0], [0.0, 0.0]])
        plus = 0.5 * np.ones((2, 2))
        self.A = (1 - c) * np.eye(2) / 2 + c * zero
        self.B = (1 - c) * np.eye(2) / 2 + c * plus
        self.outputs = [DensityOperator((1 - k / n) * self.A + (k / n) * self.B) for k in range(n + 1)]

    def output(self, s: Dataset) -> DensityOperator:
        return self.outputs[s.type_counts()[1]]

    def delta_at(self, eps: float, distance: int = 1) -> float:
        """Tight δ over all output pairs whose types differ by ``distance``."""
        e = math.exp(eps)
        worst = 0.0
        for k in range(self.n + 1 - distance):
            pr = StatePair(self.outputs[k], self.outputs[k + distance])
            worst = max(worst, pr.hockey_stick(e), pr.swapped().hockey_stick(e))
        return worst

    def min_mass(self) -> float:
        return float(min(o.eigenvalues[-1] for o in self.outputs))

    def sequences(self) -> list[Dataset]:
        return [Dataset(s, (0, 1)) for s in itertools.product((0, 1), repeat=self.n)]

    def ensemble(self, prior: Sequence[float]) -> CQEnsemble:
        seqs = self.sequences()
        pr = np.asarray(prior, dtype=float)
        if pr.size != len(seqs):
            raise LengthMismatch(f"prior needs {len(seqs)} weights")
        return CQEnsemble(tuple((w, self.output(s)) for w, s in zip(pr, seqs)))


@dataclass
class AuditResult:
    eps: float
    delta: float
    m: float
    report: StabilityReport
    holevo_values: list
    group_privacy_ok: bool
    mixture_step_ok: bool

    @property
    def ok(self) -> bool:
        return max(self.holevo_values) <= self.report.bound + 1e-12 and self.group_privacy_ok and self.mixture_step_ok


def audit_toy_learner(learner: ToyLearner, eps: float, priors: Sequence[Sequence[float]]) -> AuditResult:
    """Measure Holevo information of the toy learner under several priors and compare with the bound.

    δ is the learner's tight 1-neighbour value at ``eps``. Also checks group
    privacy at every type distance and the mixture step
    ``D(ω_s ‖ uniform type mixture) ≤ log(#types)``.

    Raises:
        AssumptionViolated: if the bound's ``g < 1`` premise fails.
    """
    delta = learner.delta_at(eps)
    p = PrivacyParams(eps, min(delta, 1 - 1e-15))
    m = learner.min_mass()
    report = stability_report(learner.n, 2, p, m)
    values = [holevo(learner.ensemble(pr)) for pr in priors]
    report.holevo = max(values)

    group_ok = True
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for k in range(1, learner.n + 1):
            gk = g_k(k, p)
            if gk >= 1:
                continue
            for j in range(learner.n + 1 - k):
                pr = StatePair(learner.outputs[j], learner.outputs[j + k])
                if not certify_dp(pr, PrivacyParams(k * eps, gk)).is_dp:
                    group_ok = False

    types = len(learner.outputs)
    comps = [(1.0 / types, o) for o in learner.outputs]
    mix = DensityOperator(sum(w * o.matrix for w, o in comps))
    mixture_ok = True
    for o in learner.outputs:
        bnd = mixture_kl_bound(o, comps)
        actual = relative_entropy(StatePair(o, mix))
        if not (actual <= bnd.bound_tight + 1e-10 and bnd.bound_tight <= math.log(types) + 1e-10):
            mixture_ok = False
    return AuditResult(eps, delta, m, report, values, group_ok, mixture_ok)
