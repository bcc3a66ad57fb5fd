"""Unit tests for the dense linear-algebra layer."""

import numpy as np
import pytest

from qchan.errors import DimensionMismatchError, NotHermitianError, NotPsdError
from qchan.matcore import (
    Tolerance,
    eig_hermitian,
    is_psd,
    kron,
    partial_trace,
    partial_transpose,
    psd_sqrt,
    rank_tol,
    schur_product,
    trace_norm,
)


def _unit(d, i, j):
    m = np.zeros((d, d), dtype=complex)
    m[i, j] = 1.0
    return m


def _random_herm(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return g + g.conj().T


def _random_psd(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return g @ g.conj().T


def test_tolerance_validation():
    Tolerance(1e-9, 1e-9, 1e-9)
    with pytest.raises(ValueError):
        Tolerance(eps_rank=0.0)
    with pytest.raises(ValueError):
        Tolerance(eps_eq=1e-2)
    with pytest.raises(ValueError):
        Tolerance(eps_psd=-1e-9)


def test_kron_identity():
    np.testing.assert_allclose(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_elementary_units():
    out = kron(_unit(2, 0, 0), _unit(2, 1, 1))
    expected = np.zeros((4, 4))
    expected[1, 1] = 1.0
    np.testing.assert_allclose(out, expected)


def test_kron_diagonal_expansion():
    out = kron(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))
    np.testing.assert_allclose(out, np.diag([3.0, 4.0, 6.0, 8.0]))


def test_partial_trace_product_state():
    rng = np.random.default_rng(0)
    p = _random_psd(rng, 3)
    q = _random_psd(rng, 2)
    out = partial_trace(kron(p, q), (3, 2), "second")
    np.testing.assert_allclose(out, np.trace(q) * p, atol=1e-12)
    out = partial_trace(kron(p, q), (3, 2), "first")
    np.testing.assert_allclose(out, np.trace(p) * q, atol=1e-12)


def test_partial_trace_identity():
    np.testing.assert_allclose(partial_trace(np.eye(4), (2, 2), "first"), 2 * np.eye(2))


def test_partial_trace_max_entangled():
    v = (np.kron([1, 0], [1, 0]) + np.kron([0, 1], [0, 1])) / np.sqrt(2)
    rho = np.outer(v, v.conj())
    np.testing.assert_allclose(
        partial_trace(rho, (2, 2), "second"), np.eye(2) / 2, atol=1e-12
    )


def test_partial_trace_preserves_trace():
    rng = np.random.default_rng(1)
    for da, db in [(2, 2), (2, 3), (3, 2)]:
        m = _random_herm(rng, da * db)
        for side in ("first", "second"):
            assert abs(np.trace(partial_trace(m, (da, db), side)) - np.trace(m)) < 1e-10


def test_partial_trace_dim_mismatch():
    with pytest.raises(DimensionMismatchError):
        partial_trace(np.eye(5), (2, 2), "first")


def test_partial_transpose_product():
    rng = np.random.default_rng(2)
    p = _random_herm(rng, 2)
    q = _random_herm(rng, 3)
    np.testing.assert_allclose(
        partial_transpose(kron(p, q), (2, 3)), kron(p.T, q), atol=1e-12
    )


def test_partial_transpose_involution_exact():
    rng = np.random.default_rng(3)
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    assert np.array_equal(partial_transpose(partial_transpose(m, (2, 3)), (2, 3)), m)


def test_partial_transpose_max_entangled_min_eig():
    v = (np.kron([1, 0], [1, 0]) + np.kron([0, 1], [0, 1])) / np.sqrt(2)
    rho = np.outer(v, v.conj())
    vals = np.linalg.eigvalsh(partial_transpose(rho, (2, 2)))
    assert abs(vals.min() + 0.5) < 1e-12


def test_eig_hermitian_identity():
    vals, _ = eig_hermitian(np.eye(3))
    np.testing.assert_allclose(vals, [1, 1, 1])


def test_eig_hermitian_diag_descending():
    vals, vecs = eig_hermitian(np.diag([2.0, 0.0, -1.0]))
    np.testing.assert_allclose(vals, [2.0, 0.0, -1.0])
    # permutation eigenvectors with the positive-phase convention
    np.testing.assert_allclose(np.abs(vecs), np.eye(3), atol=1e-12)


def test_eig_hermitian_flip():
    f = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            f[i * 2 + j, j * 2 + i] = 1.0
    vals, _ = eig_hermitian(f)
    np.testing.assert_allclose(vals, [1, 1, 1, -1], atol=1e-12)


def test_eig_hermitian_reconstruction():
    rng = np.random.default_rng(4)
    for _ in range(20):
        m = _random_herm(rng, 5)
        vals, vecs = eig_hermitian(m)
        recon = vecs @ np.diag(vals) @ vecs.conj().T
        assert np.linalg.norm(m - recon) <= 1e-9 * np.linalg.norm(m)
        assert np.linalg.norm(vecs.conj().T @ vecs - np.eye(5)) < 1e-9


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_rank_tol_zero_matrix():
    assert rank_tol(np.zeros((3, 3))) == 0


def test_rank_tol_outer_product():
    v = np.array([1.0, 2.0, 3.0])
    w = np.array([0.5, -1.0])
    assert rank_tol(np.outer(v, w)) == 1


def test_rank_tol_noise_perturbation():
    rng = np.random.default_rng(5)
    for d in (2, 4, 8):
        m = np.eye(d) + 1e-14 * rng.normal(size=(d, d))
        assert rank_tol(m) == d


def test_is_psd_basic():
    assert is_psd(np.eye(3))
    assert not is_psd(np.diag([1.0, -1.0]))


def test_is_psd_gram_matrices():
    rng = np.random.default_rng(6)
    for _ in range(10):
        vs = rng.normal(size=(4, 3)) + 1j * rng.normal(size=(4, 3))
        gram = vs.conj().T @ vs
        assert is_psd(gram)


def test_is_psd_principal_submatrices():
    rng = np.random.default_rng(7)
    m = _random_psd(rng, 5)
    assert is_psd(m)
    for keep in ([0, 1], [1, 3, 4], [2]):
        sub = m[np.ix_(keep, keep)]
        assert is_psd(sub)


def test_is_psd_rejects_large_hermiticity_defect():
    m = np.array([[1.0, 1.0], [0.0, 1.0]])
    assert not is_psd(m)


def test_schur_product():
    t = np.arange(4.0).reshape(2, 2)
    np.testing.assert_allclose(schur_product(np.ones((2, 2)), t), t)
    np.testing.assert_allclose(schur_product(np.eye(2), t), np.diag(np.diag(t)))
    with pytest.raises(DimensionMismatchError):
        schur_product(np.eye(2), np.eye(3))


def test_schur_product_of_psd_is_psd():
    rng = np.random.default_rng(8)
    for _ in range(10):
        a = _random_psd(rng, 4)
        b = _random_psd(rng, 4)
        assert is_psd(schur_product(a, b))


def test_trace_norm_values():
    assert abs(trace_norm(np.eye(4)) - 4.0) < 1e-12
    v = np.array([1.0, 2.0, 2.0])
    assert abs(trace_norm(np.outer(v, v.conj())) - 9.0) < 1e-12
    assert abs(trace_norm(np.diag([1.0, -2.0, 3.0])) - 6.0) < 1e-12


def test_trace_norm_triangle_inequality():
    rng = np.random.default_rng(9)
    for _ in range(20):
        a = _random_herm(rng, 4)
        b = _random_herm(rng, 4)
        assert trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-9


def test_psd_sqrt():
    rng = np.random.default_rng(10)
    m = _random_psd(rng, 4)
    b = psd_sqrt(m)
    np.testing.assert_allclose(b @ b, m, atol=1e-10)
    # singular input
    v = rng.normal(size=3)
    singular = np.outer(v, v)
    b = psd_sqrt(singular)
    np.testing.assert_allclose(b @ b, singular, atol=1e-10)
    with pytest.raises(NotPsdError):
        psd_sqrt(np.diag([1.0, -1.0]))
