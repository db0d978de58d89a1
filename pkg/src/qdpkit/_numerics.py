"""Shared numerical helpers: segmented quadrature and a vectorised golden-section search."""

from __future__ import annotations

import math
import warnings
from typing import Callable, Iterable

import numpy as np
from scipy import integrate

TOL_INT = 1e-6
QUAD_ABS_TOL = 1e-8

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def integrate_segments(
    func: Callable[[float], float],
    a: float,
    b: float,
    breakpoints: Iterable[float] = (),
    epsabs: float = QUAD_ABS_TOL,
) -> float:
    """Integrate ``func`` over ``[a, b]`` split at every breakpoint inside the interval.

    Each segment is handed to QUADPACK separately, so kinks of a
    piecewise-smooth integrand never fall inside a segment.
    """
    if not b > a:
        return 0.0
    pts = sorted({float(p) for p in breakpoints if a < p < b} | {float(a), float(b)})
    total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for lo, hi in zip(pts[:-1], pts[1:]):
            if hi - lo <= 1e-15 * max(1.0, abs(hi)):
                continue
            val, _ = integrate.quad(func, lo, hi, epsabs=epsabs, epsrel=1e-10, limit=200)
            total += val
    return total


def golden_section_max(
    func: Callable[[np.ndarray], np.ndarray],
    lo: np.ndarray,
    hi: np.ndarray,
    iterations: int = 200,
) -> tuple[np.ndarray, np.ndarray]:
    """Maximise a batch of concave 1-D functions simultaneously.

    ``func`` maps an array of abscissae (one per problem) to the array of
    objective values. Returns ``(argmax, max)``. The endpoints are also
    evaluated, so optima sitting on the boundary are found exactly.
    """
    a = np.asarray(lo, dtype=float).copy()
    b = np.asarray(hi, dtype=float).copy()
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc = func(c)
    fd = func(d)
    for _ in range(iterations):
        left = fc >= fd
        # keep [a, d] where the left probe wins, otherwise [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = b - _INV_PHI * (b - a)
        new_d = a + _INV_PHI * (b - a)
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        fc_old, fd_old = fc, fd
        probe = np.where(left, c_next, d_next)
        fprobe = func(probe)
        fc = np.where(left, fprobe, fd_old)
        fd = np.where(left, fc_old, fprobe)
        c, d = c_next, d_next
        if np.all(b - a <= 1e-15 * np.maximum(1.0, np.abs(b))):
            break
    cands = np.stack([np.asarray(lo, dtype=float), np.asarray(hi, dtype=float), c, d])
    vals = np.stack([func(cands[0]), func(cands[1]), fc, fd])
    best = np.argmax(vals, axis=0)
    idx = np.arange(cands.shape[1])
    return cands[best, idx], vals[best, idx]
