"""Unit tests for complementary-channel construction and verification."""

import numpy as np
import pytest

from qchan import matcore, zoo
from qchan.complement import (
    complement_from_kraus,
    complement_pair,
    connecting_isometry,
    is_complementary_pair,
    is_self_complementary,
    minimal_complement,
)
from qchan.errors import DimensionMismatchError
from qchan.matcore import matrix_unit
from qchan.reprs import (
    KrausRep,
    StinespringRep,
    apply,
    choi_from_kraus,
    choi_rank,
    is_trace_preserving,
    kraus_from_choi,
    stinespring_from_kraus,
)


def _haar(seed, d):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_complement_single_op_is_trace_functional():
    a = np.array([[1.0, 2.0], [0.0, 1.0]])
    comp = complement_from_kraus(KrausRep(2, 2, (a,)))
    assert comp.d_out == 1
    t = np.array([[1.0, 1.0j], [-1.0j, 2.0]])
    np.testing.assert_allclose(
        apply(comp, t), [[np.trace(a @ t @ a.conj().T)]], atol=1e-12
    )


def test_pinching_complement_is_itself():
    k = zoo.pinching(3)
    comp = complement_from_kraus(k)
    np.testing.assert_allclose(
        choi_from_kraus(comp).mat, choi_from_kraus(k).mat, atol=1e-12
    )


def test_schur_complement_formula():
    rng = np.random.default_rng(0)
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    a = g @ g.conj().T
    k = zoo.schur_map(a)
    comp = complement_from_kraus(k)
    # the complement only sees the diagonal of its argument
    t = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    t_diag = np.diag(np.diag(t))
    np.testing.assert_allclose(apply(comp, t), apply(comp, t_diag), atol=1e-10)
    # and its output Gram data reproduces the multiplier
    out = {j: apply(comp, matrix_unit(3, j, j)) for j in range(3)}
    for i in range(3):
        for j in range(3):
            # <z_i, z_j> = a[i, j] realised through the prepared states
            val = np.trace(out[i] @ out[j])
            assert abs(val - abs(a[i, j]) ** 2) < 1e-8


def test_complement_formula_matches_dilation():
    k = zoo.random_channel(3, 2, 3, seed=1)
    s = stinespring_from_kraus(k)
    comp = complement_from_kraus(k)
    for i in range(3):
        for j in range(3):
            e = matrix_unit(3, i, j)
            via_dilation = matcore.partial_trace(
                s.a @ e @ s.a.conj().T, (2, s.env_dim), "first"
            )
            np.testing.assert_allclose(via_dilation, apply(comp, e), atol=1e-10)


def test_minimal_complement_env_dims():
    u = _haar(2, 3)
    assert minimal_complement(KrausRep(3, 3, (u,))).d_out == 1
    assert minimal_complement(zoo.pinching(4)).d_out == 4
    # redundant Kraus list collapses to Choi rank one
    redundant = KrausRep(2, 2, (np.eye(2) / np.sqrt(2), np.eye(2) / np.sqrt(2)))
    assert minimal_complement(redundant).d_out == 1
    k = zoo.random_channel(2, 3, 4, seed=3)
    assert minimal_complement(k).d_out == choi_rank(k)


def test_complement_preserves_traces():
    k = zoo.random_channel(3, 2, 3, seed=4)
    comp = complement_from_kraus(k)
    assert is_trace_preserving(comp)
    assert abs(
        np.trace(choi_from_kraus(comp).mat) - np.trace(choi_from_kraus(k).mat)
    ) < 1e-9


# ---------------------------------------------------------------------------
# connecting isometry
# ---------------------------------------------------------------------------


def test_connecting_isometry_identity():
    k = kraus_from_choi(choi_from_kraus(zoo.random_channel(3, 2, 3, seed=5)))
    s = stinespring_from_kraus(k)
    v = connecting_isometry(s, s)
    np.testing.assert_allclose(v, np.eye(s.env_dim), atol=1e-9)


def test_connecting_isometry_zero_padding():
    k = kraus_from_choi(choi_from_kraus(zoo.random_channel(3, 2, 3, seed=6)))
    s1 = stinespring_from_kraus(k)
    env2 = s1.env_dim + 1
    a2 = np.zeros((s1.d_out * env2, 3), dtype=complex)
    t = s1.a.reshape(s1.d_out, s1.env_dim, 3)
    for r in range(s1.d_out):
        a2[r * env2 : r * env2 + s1.env_dim, :] = t[r]
    s2 = StinespringRep(3, 2, env2, a2)
    v = connecting_isometry(s1, s2)
    assert v is not None
    np.testing.assert_allclose(v[: s1.env_dim, :], np.eye(s1.env_dim), atol=1e-9)
    np.testing.assert_allclose(v[s1.env_dim :, :], 0.0, atol=1e-9)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(s1.env_dim), atol=1e-9)


def test_connecting_isometry_recovers_unitary_mixing():
    k = kraus_from_choi(choi_from_kraus(zoo.random_channel(2, 2, 4, seed=7)))
    s1 = stinespring_from_kraus(k)
    u = _haar(8, k.num_ops)
    mixed = KrausRep(
        2, 2,
        tuple(
            sum(u[i, j] * k.ops[j] for j in range(k.num_ops))
            for i in range(k.num_ops)
        ),
    )
    v = connecting_isometry(s1, stinespring_from_kraus(mixed))
    np.testing.assert_allclose(v, u, atol=1e-9)
    assert np.linalg.norm(v.conj().T @ v - np.eye(k.num_ops)) <= 1e-8


def test_connecting_isometry_unrelated_is_none():
    s1 = stinespring_from_kraus(
        kraus_from_choi(choi_from_kraus(zoo.random_channel(3, 2, 3, seed=9)))
    )
    s2 = stinespring_from_kraus(
        kraus_from_choi(choi_from_kraus(zoo.random_channel(3, 2, 3, seed=10)))
    )
    assert connecting_isometry(s1, s2) is None


def test_connecting_isometry_dimension_errors():
    s1 = stinespring_from_kraus(zoo.pinching(2))
    s2 = stinespring_from_kraus(zoo.pinching(3))
    with pytest.raises(DimensionMismatchError):
        connecting_isometry(s1, s2)
    small = stinespring_from_kraus(KrausRep(2, 2, (np.eye(2),)))
    with pytest.raises(DimensionMismatchError):
        connecting_isometry(s1, small)


# ---------------------------------------------------------------------------
# complementarity certificates
# ---------------------------------------------------------------------------


def test_unitary_conjugation_and_trace_map_are_complementary():
    u = _haar(11, 3)
    phi = KrausRep(3, 3, (u,))
    trace_map = complement_from_kraus(phi)
    cert = is_complementary_pair(phi, trace_map)
    assert cert.verdict.value == "True"
    v = cert.witness["isometry"]
    assert np.linalg.norm(v.conj().T @ v - np.eye(1)) <= 1e-8


def test_pinching_pair_is_complementary():
    p = zoo.pinching(3)
    assert is_complementary_pair(p, p).verdict.value == "True"


def test_identity_pair_is_not_complementary():
    ident = KrausRep(2, 2, (np.eye(2),))
    cert = is_complementary_pair(ident, ident)
    assert cert.verdict.value == "False"


def test_dimension_mismatch_yields_false_certificate():
    phi = zoo.pinching(2)
    psi = zoo.pinching(3)
    assert is_complementary_pair(phi, psi).verdict.value == "False"


def test_double_complement_identity_and_pairing():
    for seed in range(5):
        k = zoo.random_channel(2, 2, 3, seed=seed)
        comp = complement_from_kraus(k)
        cc = complement_from_kraus(comp)
        np.testing.assert_allclose(
            choi_from_kraus(cc).mat, choi_from_kraus(k).mat, atol=1e-9
        )
        assert is_complementary_pair(k, comp).verdict.value == "True"
        assert is_complementary_pair(comp, k).verdict.value == "True"


def test_complement_pair_bundle():
    k = zoo.random_channel(2, 3, 2, seed=12)
    pair = complement_pair(k)
    assert pair.complement.d_out == k.num_ops
    assert pair.joint_stinespring.env_dim == k.num_ops


def test_self_complementary_verdicts():
    assert is_self_complementary(zoo.pinching(2)).verdict.value == "True"
    cert = is_self_complementary(zoo.pinching(4))
    assert cert.verdict.value == "True"
    assert cert.witness["residual"] <= 1e-8
    ident = KrausRep(2, 2, (np.eye(2),))
    assert is_self_complementary(ident).verdict.value == "False"


def test_repeated_preparation_not_self_complementary():
    from qchan.reprs import holevo_to_kraus
    from .test_reprs import repeated_preparation_form

    k = holevo_to_kraus(repeated_preparation_form())
    assert is_self_complementary(k).verdict.value == "False"
