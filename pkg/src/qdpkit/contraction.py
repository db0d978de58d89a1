"""Quantum channels and hockey-stick contraction under local differential privacy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .divergence import StatePair
from .dpcert import PrivacyParams, _params
from .errors import DimMismatch, InvalidParams, NotTracePreserving
from .linop import TOL_RECON, TOL_SUPP, DensityOperator, matrix_to_json
from .sampling import orthogonal_pure_pairs, random_mixed, random_pure, trial_rng


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """CPTP map given by Kraus operators of shape ``(d_out, d_in)``."""

    kraus: tuple

    def __post_init__(self):
        ks = [np.asarray(k, dtype=complex) for k in self.kraus]
        if not ks:
            raise InvalidParams("a channel needs at least one Kraus operator")
        shape = ks[0].shape
        if any(k.ndim != 2 or k.shape != shape for k in ks):
            raise DimMismatch("all Kraus operators must share one 2-D shape")
        s = sum(k.conj().T @ k for k in ks)
        if np.max(np.abs(s - np.eye(shape[1]))) > TOL_RECON:
            raise NotTracePreserving("sum of K^dagger K differs from the identity")
        for k in ks:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", tuple(ks))

    @property
    def d_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus[0].shape[0]

    def __call__(self, rho) -> DensityOperator:
        return apply(self, rho)

    def to_json(self) -> dict:
        return {"kraus": [matrix_to_json(k) for k in self.kraus]}

    @classmethod
    def from_json(cls, obj: dict) -> "QuantumChannel":
        try:
            items = obj["kraus"]
        except (KeyError, TypeError) as exc:
            raise InvalidParams(f"malformed channel JSON: {exc}") from exc
        ks = []
        for item in items:
            re = np.asarray(item["re"], dtype=float)
            im = np.asarray(item.get("im", np.zeros_like(re)), dtype=float)
            ks.append(re + 1j * im)
        return cls(tuple(ks))

    @classmethod
    def identity(cls, dim: int) -> "QuantumChannel":
        return cls((np.eye(dim),))

    @classmethod
    def fully_depolarizing(cls, dim: int) -> "QuantumChannel":
        eye = np.eye(dim)
        return cls(tuple(np.outer(eye[i], eye[j]) / math.sqrt(dim) for i in range(dim) for j in range(dim)))

    @classmethod
    def measure_prepare(cls, outputs: Sequence[DensityOperator]) -> "QuantumChannel":
        """Measure in the computational basis and prepare ``outputs[i]`` on outcome ``i``.

        Kraus operators are ``sqrt(w_k) |v_k><i|`` for each eigenpair of each output.
        """
        ks = []
        d_in = len(outputs)
        eye = np.eye(d_in)
        for i, out in enumerate(outputs):
            out = out if isinstance(out, DensityOperator) else DensityOperator(out)
            for w, v in zip(out.eigenvalues, out.eigenvectors.T):
                if w > 0:
                    ks.append(math.sqrt(w) * np.outer(v, eye[i]))
        return cls(tuple(ks))

    @classmethod
    def depolarized_measurement(cls, dim: int, lam: float) -> "QuantumChannel":
        """``λ · (computational measurement) + (1−λ) · I/d``."""
        if not 0 <= lam <= 1:
            raise InvalidParams("mixing weight must lie in [0, 1]")
        eye = np.eye(dim)
        outs = [DensityOperator(lam * np.outer(eye[i], eye[i]) + (1 - lam) * eye / dim) for i in range(dim)]
        return cls.measure_prepare(outs)


def apply(ch: QuantumChannel, rho) -> DensityOperator:
    """``Σ K ρ K†``."""
    m = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)
    if m.shape != (ch.d_in, ch.d_in):
        raise DimMismatch(f"channel expects dimension {ch.d_in}, got {m.shape}")
    out = sum(k @ m @ k.conj().T for k in ch.kraus)
    return DensityOperator(0.5 * (out + out.conj().T))


def _input_pairs(d: int, trials: int, seed: int):
    for a, b in orthogonal_pure_pairs(d):
        yield a, b
    for i in range(trials):
        rng = trial_rng(seed, i)
        if i % 2 == 0:
            yield random_pure(d, rng), random_pure(d, rng)
        else:
            yield random_mixed(d, rng), random_mixed(d, rng)


class LDPEstimate(NamedTuple):
    certified_up_to_sampling: bool
    worst_delta: float


def certify_ldp(ch: QuantumChannel, p: PrivacyParams, trials: int = 200, seed: int = 0) -> LDPEstimate:
    """Sampling-based (ε, δ)-LDP verdict: never a proof.

    ``worst_delta`` is the largest ``E_{e^ε}(N(ρ)‖N(σ))`` seen over orthogonal
    pure seeds and ``trials`` random input pairs (both orders).
    """
    p = _params(p)
    if trials < 1:
        raise InvalidParams("trials must be >= 1")
    worst = 0.0
    for a, b in _input_pairs(ch.d_in, trials, seed):
        out = StatePair(apply(ch, a), apply(ch, b))
        worst = max(worst, out.hockey_stick(p.e), out.swapped().hockey_stick(p.e))
    return LDPEstimate(bool(worst <= p.delta + 1e-12), float(worst))


def eta_weakest_closed_form(p: PrivacyParams, gamma):
    """``E_γ`` of the weakest pair for ``γ ≥ 1``.

    ``(e^ε − γ + δ(γ+1))/(e^ε+1)`` up to ``γ = e^ε`` and ``δ`` beyond.
    """
    p = _params(p)
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 1):
        raise InvalidParams("gamma must be >= 1")
    e, d = p.e, p.delta
    v = np.where(g <= e, (e - g + d * (g + 1)) / (e + 1), d)
    return float(v) if v.ndim == 0 else v


class EtaBounds(NamedTuple):
    lower: float
    upper: float


def eta_bounds(p: PrivacyParams, gamma: float) -> EtaBounds:
    """Sandwich on the E_γ contraction coefficient of (ε, δ)-LDP channels.

    ``η_1 = (e^ε − 1 + 2δ)/(e^ε + 1)``; lower ``η_1 + (2−δ)(1−γ)/(e^ε+1)``
    and upper ``η_1 + (1−δ)(1−γ)/(e^ε+1)`` (or ``δ`` once γ > e^ε).
    """
    p = _params(p)
    if gamma < 1:
        raise InvalidParams("gamma must be >= 1")
    e, d = p.e, p.delta
    eta1 = (e - 1 + 2 * d) / (e + 1)
    lower = eta1 + (2 - d) * (1 - gamma) / (e + 1)
    upper = eta1 + (1 - d) * (1 - gamma) / (e + 1) if gamma <= e else d
    return EtaBounds(float(lower), float(upper))


def empirical_contraction(ch: QuantumChannel, gamma: float, trials: int = 200, seed: int = 0) -> float:
    """Largest sampled ratio ``E_γ(N(ρ)‖N(σ)) / E_γ(ρ‖σ)``: a lower estimate of η.

    Inputs with ``E_γ(ρ‖σ) ≤ TOL_SUPP`` are skipped.
    """
    if trials < 1:
        raise InvalidParams("trials must be >= 1")
    best = 0.0
    for a, b in _input_pairs(ch.d_in, trials, seed):
        for x, y in ((a, b), (b, a)):
            den = StatePair(x, y).hockey_stick(gamma)
            if den <= TOL_SUPP:
                continue
            num = StatePair(apply(ch, x), apply(ch, y)).hockey_stick(gamma)
            best = max(best, num / den)
    return float(best)


def classical_contraction(K, P, Q, gamma: float) -> float:
    """``E_γ(K(P)‖K(Q)) / E_γ(P‖Q)`` for a Markov kernel (0 when the denominator vanishes)."""
    from .classical import hockey_stick_c

    den = hockey_stick_c(P, Q, gamma)
    if den <= TOL_SUPP:
        return 0.0
    return hockey_stick_c(K.apply(P), K.apply(Q), gamma) / den
