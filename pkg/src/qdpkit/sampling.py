"""Seeded random states, pairs and channels.

Pure states are normalised complex Gaussian vectors. Mixed states are partial
traces of random bipartite pure states. Every helper takes a
``numpy.random.Generator``; :func:`trial_rng` derives an independent stream for
each trial index so results do not depend on scheduling.
"""

from __future__ import annotations

import numpy as np

from .linop import DensityOperator


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def random_pure(dim: int, rng: np.random.Generator) -> DensityOperator:
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return DensityOperator.pure(psi)


def random_mixed(dim: int, rng: np.random.Generator, env_dim: int | None = None) -> DensityOperator:
    """Reduced state of a random pure state on ``dim x env_dim`` (full rank when env_dim >= dim)."""
    env = dim if env_dim is None else env_dim
    g = rng.standard_normal((dim, env)) + 1j * rng.standard_normal((dim, env))
    rho = g @ g.conj().T
    return DensityOperator(rho / np.real(np.trace(rho)))


def random_diagonal(dim: int, rng: np.random.Generator) -> DensityOperator:
    return DensityOperator.diag(rng.dirichlet(np.ones(dim)))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (z + z.conj().T)


def random_effect(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random operator ``0 ≤ Λ ≤ I`` with eigenvalues uniform on [0, 1]."""
    u = random_unitary(dim, rng)
    return (u * rng.uniform(0, 1, dim)) @ u.conj().T


def orthogonal_pure_pairs(dim: int) -> list[tuple[DensityOperator, DensityOperator]]:
    """Deterministic orthogonal pure pairs: computational, Fourier-rotated and Hadamard-like."""
    eye = np.eye(dim)
    pairs = []
    for i in range(dim):
        for j in range(i + 1, dim):
            pairs.append((DensityOperator.pure(eye[i]), DensityOperator.pure(eye[j])))
            plus = (eye[i] + eye[j]) / np.sqrt(2)
            minus = (eye[i] - eye[j]) / np.sqrt(2)
            pairs.append((DensityOperator.pure(plus), DensityOperator.pure(minus)))
            ip = (eye[i] + 1j * eye[j]) / np.sqrt(2)
            im = (eye[i] - 1j * eye[j]) / np.sqrt(2)
            pairs.append((DensityOperator.pure(ip), DensityOperator.pure(im)))
    return pairs
