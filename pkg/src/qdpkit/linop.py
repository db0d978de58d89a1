"""Dense Hermitian linear algebra: eigendecomposition, positive parts, matrix
functions and density-operator validation.

Operators are plain ``numpy`` arrays. :class:`DensityOperator` wraps a validated
state together with its (cached) spectral decomposition.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import DimMismatch, NonHermitian, NotPSD, TraceError

TOL_HERM = 1e-9
TOL_PSD = 1e-9
TOL_TRACE = 1e-10
TOL_SUPP = 1e-10
TOL_RECON = 1e-8


def as_hermitian(a, tol: float = TOL_HERM) -> np.ndarray:
    """Return ``a`` as a complex Hermitian array.

    The check is absolute for operators of unit scale and relative for larger
    ones. The returned array is the exact Hermitian part ``(A + A^†)/2``.

    Raises:
        DimMismatch: if ``a`` is not a square 2-D array.
        NonHermitian: if ``a`` differs from its adjoint by more than ``tol``.
    """
    if isinstance(a, DensityOperator):
        return a.matrix
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimMismatch(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonHermitian("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(arr))))
    asym = float(np.max(np.abs(arr - arr.conj().T)))
    if asym > tol * scale:
        raise NonHermitian(f"matrix is not Hermitian (max |A - A^dagger| = {asym:.3e})")
    return 0.5 * (arr + arr.conj().T)


def eig_hermitian(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix with eigenvalues in descending order.

    Returns:
        ``(w, V)`` with ``A = V @ diag(w) @ V^†``.
    """
    h = as_hermitian(a)
    w, v = np.linalg.eigh(h)
    return w[::-1].copy(), v[:, ::-1].copy()


def eigvals_hermitian(a) -> np.ndarray:
    """Eigenvalues only, descending."""
    return np.linalg.eigvalsh(as_hermitian(a))[::-1].copy()


def positive_part_trace(a) -> float:
    """``Tr (A)_+``, the sum of the positive eigenvalues of ``A``."""
    w = np.linalg.eigvalsh(as_hermitian(a))
    return float(np.sum(w[w > 0]))


def trace_norm(a) -> float:
    """Schatten-1 norm of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(as_hermitian(a)))))


def apply_spectral(
    w: np.ndarray, v: np.ndarray, func: Callable[[np.ndarray], np.ndarray], mask=None
) -> np.ndarray:
    """Build ``V diag(func(w)) V^†``, leaving eigenvalues outside ``mask`` at zero."""
    vals = np.zeros_like(w, dtype=float)
    if mask is None:
        mask = np.ones_like(w, dtype=bool)
    vals[mask] = func(w[mask])
    return (v * vals) @ v.conj().T


def matrix_function(a, func: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    w, v = eig_hermitian(a)
    return apply_spectral(w, v, func)


class DensityOperator:
    """A validated density matrix with its spectral decomposition.

    Eigenvalues in ``[-TOL_PSD, 0)`` are clipped to zero; anything more negative
    is rejected. Instances are immutable: the stored matrix is read-only.

    Args:
        matrix: square array-like, Hermitian, PSD, unit trace.

    Raises:
        NonHermitian, NotPSD, TraceError, DimMismatch
    """

    __slots__ = ("matrix", "eigenvalues", "eigenvectors", "support_rank")

    def __init__(self, matrix):
        if isinstance(matrix, DensityOperator):
            src = matrix
            for name in self.__slots__:
                object.__setattr__(self, name, getattr(src, name))
            return
        h = as_hermitian(matrix)
        tr = float(np.real(np.trace(h)))
        if abs(tr - 1.0) > TOL_TRACE:
            raise TraceError(f"trace must be 1 within {TOL_TRACE}, got {tr!r}")
        w, v = eig_hermitian(h)
        if w[-1] < -TOL_PSD:
            raise NotPSD(f"matrix has eigenvalue {w[-1]:.3e} below -{TOL_PSD}")
        w = np.where(w < 0, 0.0, w)
        h.setflags(write=False)
        w.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "matrix", h)
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenvectors", v)
        object.__setattr__(self, "support_rank", int(np.sum(w > TOL_SUPP)))

    def __setattr__(self, name, value):
        raise AttributeError("DensityOperator is immutable")

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim}, rank={self.support_rank})"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def support_mask(self) -> np.ndarray:
        return self.eigenvalues > TOL_SUPP

    def support_projector(self) -> np.ndarray:
        v = self.eigenvectors[:, self.support_mask]
        return v @ v.conj().T

    def kernel_projector(self) -> np.ndarray:
        v = self.eigenvectors[:, ~self.support_mask]
        return v @ v.conj().T

    def power_on_support(self, p: float) -> np.ndarray:
        """``A^p`` restricted to the support (negative powers act as pseudo-inverses)."""
        return apply_spectral(
            self.eigenvalues, self.eigenvectors, lambda x: x**p, self.support_mask
        )

    def sqrt(self) -> np.ndarray:
        return apply_spectral(self.eigenvalues, self.eigenvectors, np.sqrt)

    def entropy(self) -> float:
        """Von Neumann entropy in nats."""
        w = self.eigenvalues[self.support_mask]
        return float(-np.sum(w * np.log(w)))

    def is_diagonal(self, tol: float = 1e-12) -> bool:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return bool(np.max(np.abs(off), initial=0.0) <= tol)

    @classmethod
    def diag(cls, probs) -> "DensityOperator":
        return cls(np.diag(np.asarray(probs, dtype=float)))

    @classmethod
    def pure(cls, vec) -> "DensityOperator":
        psi = np.asarray(vec, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim) / dim)


def matrix_log_on_support(rho: DensityOperator) -> np.ndarray:
    """Natural log on the support of ``rho``; zero on the kernel.

    Support inclusion between two states is the caller's responsibility.
    """
    return apply_spectral(rho.eigenvalues, rho.eigenvectors, np.log, rho.support_mask)


def support_contains(outer: DensityOperator, inner: DensityOperator) -> bool:
    """True when ``supp(inner)`` is contained in ``supp(outer)``."""
    leak = np.real(np.trace(outer.kernel_projector() @ inner.matrix))
    return bool(leak <= TOL_SUPP)


def matrix_to_json(a) -> dict:
    arr = np.asarray(a.matrix if isinstance(a, DensityOperator) else a, dtype=complex)
    return {
        "dim": int(arr.shape[0]),
        "re": np.real(arr).tolist(),
        "im": np.imag(arr).tolist(),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    """Parse the ``{"dim", "re", "im"}`` matrix format (``im`` optional)."""
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DimMismatch(f"malformed matrix JSON: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise DimMismatch(f"matrix JSON entries do not match dim={dim}")
    return re + 1j * im
