"""Tests for the dense linear algebra primitives."""

import numpy as np
import pytest

from qbundle.errors import DimensionMismatch, NotPositiveDefinite
from qbundle.linalg import (
    ID2,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    adjoint,
    commutator,
    hermitian_sqrt,
    is_hermitian,
    is_positive_definite,
    matrix_exp,
    max_abs,
    pauli_dot,
)

SEED = 2163


def random_complex(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_hermitian(rng, n):
    m = random_complex(rng, n)
    return 0.5 * (m + m.conj().T)


def random_positive(rng, n, floor=0.1):
    m = random_complex(rng, n)
    return m @ m.conj().T + floor * np.eye(n)


# ---------------------------------------------------------------- pauli


def test_pauli_algebra():
    # sigma_j sigma_k = delta_jk + i eps_jkl sigma_l
    np.testing.assert_allclose(SIGMA1 @ SIGMA1, ID2)
    np.testing.assert_allclose(SIGMA2 @ SIGMA2, ID2)
    np.testing.assert_allclose(SIGMA3 @ SIGMA3, ID2)
    np.testing.assert_allclose(commutator(SIGMA1, SIGMA2), 2j * SIGMA3)
    np.testing.assert_allclose(commutator(SIGMA2, SIGMA3), 2j * SIGMA1)
    np.testing.assert_allclose(commutator(SIGMA3, SIGMA1), 2j * SIGMA2)


def test_pauli_dot_squares_to_norm():
    rng = np.random.default_rng(SEED)
    for _ in range(50):
        v = rng.standard_normal(3)
        m = pauli_dot(v)
        np.testing.assert_allclose(m @ m, np.dot(v, v) * ID2, atol=1e-12)


def test_pauli_dot_rejects_bad_shape():
    with pytest.raises(DimensionMismatch):
        pauli_dot([1.0, 2.0])


# ---------------------------------------------------------------- predicates


def test_adjoint_and_hermiticity():
    rng = np.random.default_rng(SEED)
    m = random_complex(rng, 4)
    np.testing.assert_allclose(adjoint(m), m.conj().T)
    assert is_hermitian(m + m.conj().T)
    assert not is_hermitian(m + m.conj().T + 1e-6 * 1j * np.eye(4))


def test_positive_definiteness():
    rng = np.random.default_rng(SEED)
    for _ in range(20):
        assert is_positive_definite(random_positive(rng, 3))
    # indefinite
    assert not is_positive_definite(SIGMA3)
    # non-Hermitian
    assert not is_positive_definite(np.array([[1.0, 1.0], [0.0, 1.0]]))
    # scale-relative tolerance: a huge matrix with a relatively tiny negative
    # eigenvalue direction is not positive definite
    big = np.diag([1e16, -1.0]).astype(complex)
    assert not is_positive_definite(big)


def test_non_square_rejected():
    with pytest.raises(DimensionMismatch):
        is_hermitian(np.zeros((2, 3)))


# ---------------------------------------------------------------- sqrt


def test_hermitian_sqrt_squares_back():
    rng = np.random.default_rng(SEED)
    for n in (2, 3, 5):
        for _ in range(25):
            m = random_positive(rng, n)
            r = hermitian_sqrt(m)
            np.testing.assert_allclose(r @ r, m, atol=1e-10 * max_abs(m))
            # the root is itself Hermitian positive definite
            assert is_hermitian(r, tol=1e-10)
            assert is_positive_definite(r)


def test_hermitian_sqrt_known_value():
    m = np.array([[5.0, 3.0], [3.0, 5.0]], dtype=complex)
    # eigenvalues 2 and 8 -> root has eigenvalues sqrt(2), 2 sqrt(2)
    expected = np.array(
        [
            [0.5 * (np.sqrt(8) + np.sqrt(2)), 0.5 * (np.sqrt(8) - np.sqrt(2))],
            [0.5 * (np.sqrt(8) - np.sqrt(2)), 0.5 * (np.sqrt(8) + np.sqrt(2))],
        ]
    )
    np.testing.assert_allclose(hermitian_sqrt(m), expected, atol=1e-13)


def test_hermitian_sqrt_degenerate_spectrum():
    # proportional to the identity: root must be exactly the scaled identity
    np.testing.assert_allclose(hermitian_sqrt(4.0 * np.eye(3)), 2.0 * np.eye(3),
                               atol=1e-13)


def test_hermitian_sqrt_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        hermitian_sqrt(SIGMA3)
    with pytest.raises(NotPositiveDefinite):
        hermitian_sqrt(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NotPositiveDefinite):
        hermitian_sqrt(np.zeros((2, 2)))


# ---------------------------------------------------------------- expm


def _taylor_exp(m, terms=60):
    out = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ m / k
        out = out + term
    return out


def test_matrix_exp_against_taylor_series():
    """Series oracle on matrices of norm up to ~10 (squaring the series of
    m/16 to keep the oracle itself accurate)."""
    rng = np.random.default_rng(SEED)
    for _ in range(20):
        m = random_complex(rng, 3)
        m = m / np.linalg.norm(m, 2) * rng.uniform(0.1, 10.0)
        oracle = np.linalg.matrix_power(_taylor_exp(m / 16.0), 16)
        got = matrix_exp(m)
        assert max_abs(got - oracle) <= 1e-12 * max(1.0, max_abs(oracle))


def test_matrix_exp_pauli_closed_form():
    # exp(i a nhat . sigma) = cos(a) 1 + i sin(a) nhat . sigma
    rng = np.random.default_rng(SEED)
    for _ in range(20):
        n = rng.standard_normal(3)
        n /= np.linalg.norm(n)
        a = rng.uniform(-6, 6)
        expected = np.cos(a) * ID2 + 1j * np.sin(a) * pauli_dot(n)
        np.testing.assert_allclose(matrix_exp(1j * a * pauli_dot(n)), expected,
                                   atol=1e-12)


def test_matrix_exp_unitary_for_anti_hermitian():
    rng = np.random.default_rng(SEED)
    h = random_hermitian(rng, 4)
    u = matrix_exp(-1j * h)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-12)
