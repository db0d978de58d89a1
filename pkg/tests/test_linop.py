import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdpkit.errors import NonHermitian, NotPSD, TraceError, DimMismatch
from qdpkit.linop import (
    TOL_RECON,
    DensityOperator,
    eig_hermitian,
    matrix_from_json,
    matrix_log_on_support,
    matrix_to_json,
    positive_part_trace,
    trace_norm,
)
from qdpkit.sampling import random_hermitian


def test_eig_identity():
    w, v = eig_hermitian(np.eye(2))
    assert np.allclose(w, [1, 1])
    assert np.allclose(v @ v.conj().T, np.eye(2))


def test_eig_diagonal_sorted_descending():
    w, _ = eig_hermitian(np.diag([1.0, 3.0]))
    assert np.allclose(w, [3, 1])


def test_eig_pauli_x():
    w, v = eig_hermitian(np.array([[0, 1], [1, 0]]))
    assert np.allclose(w, [1, -1])
    plus = np.array([1, 1]) / math.sqrt(2)
    minus = np.array([1, -1]) / math.sqrt(2)
    assert abs(abs(v[:, 0] @ plus) - 1) < 1e-12
    assert abs(abs(v[:, 1] @ minus) - 1) < 1e-12


def test_non_hermitian_rejected():
    with pytest.raises(NonHermitian):
        eig_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NonHermitian):
        positive_part_trace(np.array([[1, 2j], [2j, 1]]))


def test_non_square_rejected():
    with pytest.raises(DimMismatch):
        eig_hermitian(np.ones((2, 3)))


def test_positive_part_examples():
    assert positive_part_trace(np.diag([0.4, -0.4])) == pytest.approx(0.4)
    assert positive_part_trace(np.zeros((3, 3))) == 0.0
    e = 2.0
    rho = np.diag([e, 1]) / (1 + e)
    sigma = np.diag([1, e]) / (1 + e)
    assert positive_part_trace(rho - sigma) == pytest.approx(1 / 3, abs=1e-14)
    assert positive_part_trace(rho - sigma) == pytest.approx(math.tanh(math.log(2) / 2), abs=1e-14)


def test_matrix_log_examples():
    assert np.allclose(matrix_log_on_support(DensityOperator(np.eye(2) / 2)), -math.log(2) * np.eye(2))
    d = DensityOperator.diag([1.0, 0.0])
    assert np.allclose(matrix_log_on_support(d), 0)
    assert d.support_rank == 1
    p = math.exp(-1)
    out = matrix_log_on_support(DensityOperator.diag([p, 1 - p]))
    assert np.allclose(np.diag(out), [-1, math.log(1 - p)])


def test_density_validation():
    with pytest.raises(TraceError):
        DensityOperator(np.eye(2))
    with pytest.raises(NotPSD):
        DensityOperator(np.diag([1.5, -0.5]))
    # tiny negative eigenvalues inside tolerance are clipped
    d = DensityOperator(np.diag([1.0 + 1e-10, -1e-10]))
    assert d.eigenvalues.min() == 0.0
    with pytest.raises(AttributeError):
        d.matrix = np.eye(2)


def test_json_roundtrip():
    m = np.array([[0.5, 0.25j], [-0.25j, 0.5]])
    back = matrix_from_json(matrix_to_json(m))
    assert np.array_equal(back, m)
    with pytest.raises(DimMismatch):
        matrix_from_json({"dim": 3, "re": [[1, 0], [0, 1]]})


dims = st.integers(min_value=2, max_value=8)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@given(dims, seeds)
def test_reconstruction(d, seed):
    a = random_hermitian(d, np.random.default_rng(seed))
    w, v = eig_hermitian(a)
    assert np.linalg.norm(a - (v * w) @ v.conj().T) <= TOL_RECON * np.linalg.norm(a)
    assert np.all(np.diff(w) <= 0)


@given(dims, seeds)
def test_positive_parts_sum_to_trace_norm(d, seed):
    a = random_hermitian(d, np.random.default_rng(seed))
    total = positive_part_trace(a) + positive_part_trace(-a)
    assert total == pytest.approx(trace_norm(a), rel=1e-12)
    assert total == pytest.approx(np.sum(np.abs(np.linalg.eigvalsh(a))), rel=1e-12)


@given(dims, seeds, st.floats(min_value=0, max_value=1))
def test_positive_part_convex(d, seed, t):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(d, rng), random_hermitian(d, rng)
    mid = positive_part_trace(t * a + (1 - t) * b)
    assert mid <= t * positive_part_trace(a) + (1 - t) * positive_part_trace(b) + 1e-10
