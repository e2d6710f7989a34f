import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from pencildil import (ContainmentViolation, NotHermitian, NotPSD,
                       SubspaceBasis, numerical_rank, orthocomplement_within,
                       orthonormal_range, projector, psd_sqrt)
from pencildil.linalg import spec_norm


def complex_matrices(max_dim=4):
    dims = st.tuples(st.integers(1, max_dim), st.integers(1, max_dim))
    return dims.flatmap(lambda s: hnp.arrays(
        np.float64, (s[0], s[1], 2),
        elements=st.floats(-5, 5, allow_nan=False)).map(
            lambda a: a[..., 0] + 1j * a[..., 1]))


def test_orthonormal_range_identity():
    b = orthonormal_range(np.eye(2), tol=1e-10)
    assert b.dim == 2
    np.testing.assert_allclose(projector(b), np.eye(2), atol=1e-12)


def test_orthonormal_range_single_column():
    b = orthonormal_range(np.array([[1.0], [0.0], [0.0]]))
    np.testing.assert_allclose(b.basis, [[1.0], [0.0], [0.0]], atol=1e-14)


def test_orthonormal_range_rank_one():
    # SVD of [[1,1],[1,1]] by hand: rank 1, unit vector (1,1)/sqrt(2)
    b = orthonormal_range(np.ones((2, 2)), tol=1e-10)
    assert b.dim == 1
    s = 1.0 / math.sqrt(2.0)
    np.testing.assert_allclose(b.basis, [[s], [s]], atol=1e-14)


def test_orthonormal_range_zero_matrix_and_empty():
    assert orthonormal_range(np.zeros((3, 3))).dim == 0
    assert orthonormal_range(np.zeros((3, 0))).dim == 0


def test_canonical_phase_is_real_positive():
    m = np.array([[1j], [0.5j]])
    b = orthonormal_range(m)
    i = int(np.argmax(np.abs(b.basis[:, 0])))
    val = b.basis[i, 0]
    assert abs(val.imag) < 1e-14 and val.real > 0


def test_orthocomplement_simple():
    a = SubspaceBasis(3, np.eye(3)[:, :2])
    b = SubspaceBasis(3, np.eye(3)[:, :1])
    c = orthocomplement_within(a, b)
    np.testing.assert_allclose(np.abs(c.basis), np.eye(3)[:, 1:2], atol=1e-14)


def test_orthocomplement_two_dim_by_hand():
    s = 1.0 / math.sqrt(2.0)
    a = SubspaceBasis.full(2)
    b = SubspaceBasis(2, np.array([[s], [s]]))
    c = orthocomplement_within(a, b)
    # complement of span{(1,1)}/sqrt(2) in C^2 is span{(1,-1)}/sqrt(2)
    np.testing.assert_allclose(c.basis, [[s], [-s]], atol=1e-14)


def test_orthocomplement_equal_spaces_is_empty():
    a = SubspaceBasis.full(3)
    assert orthocomplement_within(a, a).dim == 0


def test_orthocomplement_rejects_outside_vectors():
    a = SubspaceBasis(3, np.eye(3)[:, :1])
    b = SubspaceBasis(3, np.eye(3)[:, 2:3])
    with pytest.raises(ContainmentViolation):
        orthocomplement_within(a, b)


def test_projector_examples():
    np.testing.assert_allclose(projector(SubspaceBasis.empty(2)), np.zeros((2, 2)))
    np.testing.assert_allclose(projector(SubspaceBasis(2, np.eye(2)[:, :1])),
                               np.diag([1.0, 0.0]))
    s = 1.0 / math.sqrt(2.0)
    p = projector(SubspaceBasis(2, np.array([[s], [s]])))
    np.testing.assert_allclose(p, [[0.5, 0.5], [0.5, 0.5]], atol=1e-14)


def test_psd_sqrt_examples():
    np.testing.assert_allclose(psd_sqrt(np.eye(3)), np.eye(3), atol=1e-12)
    np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 0.0])), np.diag([2.0, 0.0]),
                               atol=1e-12)
    # spectral decomposition of [[2,1],[1,2]] by hand: eigenpairs
    # (3, (1,1)/sqrt2) and (1, (1,-1)/sqrt2), so the root is
    # [[(sqrt3+1)/2, (sqrt3-1)/2], [(sqrt3-1)/2, (sqrt3+1)/2]]
    r3 = math.sqrt(3.0)
    expected = 0.5 * np.array([[r3 + 1, r3 - 1], [r3 - 1, r3 + 1]])
    np.testing.assert_allclose(psd_sqrt(np.array([[2.0, 1.0], [1.0, 2.0]])),
                               expected, atol=1e-12)


def test_psd_sqrt_errors():
    with pytest.raises(NotPSD):
        psd_sqrt(np.diag([1.0, -1.0]), tol=1e-10)
    with pytest.raises(NotHermitian):
        psd_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]), tol=1e-10)


def test_numerical_rank_examples():
    assert numerical_rank(np.zeros((4, 4)), 1e-10) == 0
    assert numerical_rank(np.eye(5), 1e-10) == 5
    assert numerical_rank(np.ones((2, 2)), 1e-10) == 1


def test_bit_identical_determinism():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    b1 = orthonormal_range(m)
    b2 = orthonormal_range(m)
    assert np.array_equal(b1.basis, b2.basis)
    r1 = psd_sqrt(m.conj().T @ m, tol=1e-8)
    r2 = psd_sqrt(m.conj().T @ m, tol=1e-8)
    assert np.array_equal(r1, r2)


@settings(max_examples=30, deadline=None)
@given(complex_matrices())
def test_projector_of_range_fixes_matrix(m):
    p = projector(orthonormal_range(m))
    assert spec_norm(p @ m - m) <= 1e-9 * max(1.0, spec_norm(m))


@settings(max_examples=30, deadline=None)
@given(complex_matrices())
def test_psd_sqrt_squares_back(m):
    g = m.conj().T @ m
    root = psd_sqrt(g, tol=1e-8 * max(1.0, spec_norm(g)))
    assert spec_norm(root @ root - g) <= 1e-9 * max(1.0, spec_norm(g))


@settings(max_examples=30, deadline=None)
@given(complex_matrices(max_dim=5), st.integers(0, 3))
def test_complement_is_orthogonal_to_second_space(m, k):
    a = orthonormal_range(m)
    if a.dim == 0:
        return
    k = min(k, a.dim)
    b = orthonormal_range(a.basis[:, :k]) if k else SubspaceBasis.empty(a.ambient_dim)
    c = orthocomplement_within(a, b)
    assert c.dim == a.dim - b.dim
    if b.dim and c.dim:
        assert spec_norm(c.basis.conj().T @ b.basis) <= 1e-10
