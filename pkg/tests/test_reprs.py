"""Unit tests for channel representations and conversions."""

import numpy as np
import pytest

from qchan import matcore, zoo
from qchan.errors import DimensionMismatchError, NotPsdError
from qchan.matcore import matrix_unit
from qchan.reprs import (
    ChoiMatrix,
    HolevoForm,
    KrausRep,
    apply,
    choi_from_kraus,
    choi_rank,
    compose,
    dual,
    holevo_to_kraus,
    is_trace_preserving,
    is_unital,
    kraus_from_choi,
    kraus_from_stinespring,
    rank_one_holevo,
    stinespring_from_kraus,
    superop_from_kraus,
    vec,
)


def _haar(seed, d):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_herm(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return g + g.conj().T


def repeated_preparation_form() -> HolevoForm:
    """Measure-prepare channel M3 -> M2 whose second and third preparations
    point along the same output direction with weight one half."""
    e3 = np.eye(3)
    v1 = np.array([1.0, 0.0])
    v23 = np.array([0.0, 1.0]) / np.sqrt(2.0)
    pairs = []
    for j, v in enumerate([v1, v23, v23]):
        w = float(np.vdot(v, v).real)
        pairs.append(
            (w * np.outer(e3[:, j], e3[:, j]), np.outer(v, v.conj()) / w)
        )
    return HolevoForm(3, 2, tuple(pairs))


# ---------------------------------------------------------------------------
# construction and validation
# ---------------------------------------------------------------------------


def test_kraus_drops_zero_ops():
    k = KrausRep(2, 2, (np.zeros((2, 2)), np.eye(2)))
    assert k.num_ops == 1


def test_kraus_rejects_all_zero():
    with pytest.raises(ValueError):
        KrausRep(2, 2, (np.zeros((2, 2)),))


def test_kraus_rejects_wrong_shape():
    with pytest.raises(DimensionMismatchError):
        KrausRep(2, 3, (np.eye(2),))


def test_holevo_rejects_non_psd_effect():
    with pytest.raises(NotPsdError):
        HolevoForm(2, 2, ((np.diag([1.0, -1.0]), np.eye(2) / 2),))


def test_holevo_rejects_unnormalised_state():
    with pytest.raises(ValueError):
        HolevoForm(2, 2, ((np.eye(2), np.eye(2)),))


# ---------------------------------------------------------------------------
# apply / dual
# ---------------------------------------------------------------------------


def test_apply_identity_op():
    k = KrausRep(2, 2, (np.eye(2),))
    t = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_allclose(apply(k, t), t)


def test_apply_pinching():
    k = zoo.pinching(2)
    t = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_allclose(apply(k, t), np.diag([1.0, 4.0]))


def test_apply_transpose_family_unit_lambda():
    wh = zoo.werner_holevo(2, 1.0)
    np.testing.assert_allclose(
        apply(wh, matrix_unit(2, 0, 1)), -matrix_unit(2, 1, 0), atol=1e-9
    )


def test_dual_of_unitary_conjugation():
    u = _haar(0, 3)
    k = KrausRep(3, 3, (u,))
    d = dual(k)
    t = np.arange(9.0).reshape(3, 3)
    np.testing.assert_allclose(apply(d, t), u.conj().T @ t @ u, atol=1e-12)


def test_double_dual_choi_identity():
    k = zoo.random_channel(2, 3, 3, seed=1)
    np.testing.assert_allclose(
        choi_from_kraus(dual(dual(k))).mat, choi_from_kraus(k).mat, atol=1e-12
    )


def test_dual_of_trace_preserving_is_unital():
    k = zoo.random_channel(3, 2, 4, seed=2)
    assert is_trace_preserving(k)
    np.testing.assert_allclose(apply(dual(k), np.eye(2)), np.eye(3), atol=1e-9)


def test_duality_pairing():
    rng = np.random.default_rng(3)
    k = zoo.random_channel(3, 2, 2, seed=4)
    for _ in range(10):
        x = _random_herm(rng, 2)
        t = _random_herm(rng, 3)
        lhs = np.trace(apply(dual(k), x) @ t)
        rhs = np.trace(x @ apply(k, t))
        assert abs(lhs - rhs) <= 1e-8


# ---------------------------------------------------------------------------
# Choi conversions
# ---------------------------------------------------------------------------


def test_choi_of_identity_channel():
    k = KrausRep(2, 2, (np.eye(2),))
    c = choi_from_kraus(k)
    assert matcore.rank_tol(c.mat) == 1
    assert abs(np.trace(c.mat) - 2.0) < 1e-12
    v = vec(np.eye(2))
    np.testing.assert_allclose(c.mat, np.outer(v, v.conj()))


def test_choi_of_pinching():
    d = 3
    c = choi_from_kraus(zoo.pinching(d))
    expected = sum(
        np.kron(matrix_unit(d, i, i), matrix_unit(d, i, i)) for i in range(d)
    )
    np.testing.assert_allclose(c.mat, expected)
    assert matcore.rank_tol(c.mat) == d


def test_choi_blocks_are_channel_outputs():
    k = zoo.random_channel(2, 3, 2, seed=5)
    c = choi_from_kraus(k)
    for i in range(2):
        for j in range(2):
            np.testing.assert_allclose(
                c.block(i, j), apply(k, matrix_unit(2, i, j)), atol=1e-12
            )


def test_kraus_from_choi_identity_phase():
    c = choi_from_kraus(KrausRep(2, 2, (np.eye(2),)))
    k = kraus_from_choi(c)
    assert k.num_ops == 1
    # the global-phase convention makes the dominant entry real positive
    np.testing.assert_allclose(k.ops[0], np.eye(2), atol=1e-12)


def test_kraus_from_choi_diag_projector():
    d = 3
    c = choi_from_kraus(zoo.pinching(d))
    k = kraus_from_choi(c)
    assert k.num_ops == d
    for op in k.ops:
        assert matcore.rank_tol(op) == 1


def test_kraus_from_choi_counts_repeated_preparation():
    # independent Choi construction straight from the measure-prepare formula
    h = repeated_preparation_form()
    d_in, d_out = 3, 2
    mat = np.zeros((6, 6), dtype=complex)
    for i in range(d_in):
        for j in range(d_in):
            e = matrix_unit(d_in, i, j)
            out = sum(np.trace(e @ f) * r for f, r in h.pairs)
            mat[i * d_out : (i + 1) * d_out, j * d_out : (j + 1) * d_out] = out
    assert matcore.rank_tol(mat) == 3
    k = kraus_from_choi(ChoiMatrix(d_in, d_out, mat))
    assert k.num_ops == 3


def test_kraus_from_choi_rejects_non_psd():
    bad = np.diag([1.0, -0.5, 0.0, 0.0])
    with pytest.raises(NotPsdError):
        kraus_from_choi(ChoiMatrix(2, 2, bad))


def test_round_trip_random():
    for seed in range(5):
        k = zoo.random_channel(2, 2, 3, seed=seed)
        c1 = choi_from_kraus(k)
        c2 = choi_from_kraus(kraus_from_choi(c1))
        assert np.linalg.norm(c1.mat - c2.mat) < 1e-9


# ---------------------------------------------------------------------------
# Stinespring
# ---------------------------------------------------------------------------


def test_stinespring_single_op():
    v = np.array([[1.0, 2.0], [3.0, 4.0]])
    s = stinespring_from_kraus(KrausRep(2, 2, (v,)))
    assert s.env_dim == 1
    np.testing.assert_allclose(s.a, v)


def test_stinespring_isometry_for_channels():
    k = zoo.random_channel(3, 2, 3, seed=6)
    s = stinespring_from_kraus(k)
    np.testing.assert_allclose(s.a.conj().T @ s.a, np.eye(3), atol=1e-9)


def test_stinespring_pinching_rows():
    s = stinespring_from_kraus(zoo.pinching(2))
    expected = np.zeros((4, 2))
    expected[0, 0] = 1.0  # e1 (x) f1
    expected[3, 1] = 1.0  # e2 (x) f2
    np.testing.assert_allclose(s.a, expected)


def test_stinespring_reproduces_channel_and_roundtrip():
    k = zoo.random_channel(2, 3, 2, seed=7)
    s = stinespring_from_kraus(k)
    for i in range(2):
        for j in range(2):
            e = matrix_unit(2, i, j)
            out = matcore.partial_trace(s.a @ e @ s.a.conj().T, (3, s.env_dim), "second")
            np.testing.assert_allclose(out, apply(k, e), atol=1e-10)
    k2 = kraus_from_stinespring(s)
    np.testing.assert_allclose(
        choi_from_kraus(k2).mat, choi_from_kraus(k).mat, atol=1e-12
    )


# ---------------------------------------------------------------------------
# Holevo conversions
# ---------------------------------------------------------------------------


def test_holevo_to_kraus_single_pair():
    u = np.array([1.0, 1.0]) / np.sqrt(2)
    v = np.array([0.0, 1.0])
    h = HolevoForm(2, 2, ((np.outer(u, u.conj()), np.outer(v, v.conj())),))
    k = holevo_to_kraus(h)
    assert k.num_ops == 1
    np.testing.assert_allclose(np.abs(k.ops[0]), np.abs(np.outer(v, u.conj())), atol=1e-12)


def test_holevo_to_kraus_repeated_preparation():
    k = holevo_to_kraus(repeated_preparation_form())
    assert k.num_ops == 3
    for op in k.ops:
        assert matcore.rank_tol(op) == 1


def test_holevo_to_kraus_spectral_counts():
    h = HolevoForm(2, 2, ((np.eye(2), np.eye(2) / 2),))
    k = holevo_to_kraus(h)
    assert k.num_ops == 4


def test_holevo_to_kraus_matches_formula():
    rng = np.random.default_rng(8)
    g1 = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    f = g1 @ g1.conj().T
    g2 = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    r = g2 @ g2.conj().T
    r = r / np.trace(r).real
    h = HolevoForm(3, 2, ((f, r),))
    k = holevo_to_kraus(h)
    t = _random_herm(rng, 3)
    np.testing.assert_allclose(apply(k, t), np.trace(t @ f) * r, atol=1e-9)


def test_rank_one_holevo_roundtrip():
    h = repeated_preparation_form()
    k = holevo_to_kraus(h)
    back = rank_one_holevo(k)
    assert back is not None
    k2 = holevo_to_kraus(back)
    np.testing.assert_allclose(
        choi_from_kraus(k2).mat, choi_from_kraus(k).mat, atol=1e-9
    )


def test_rank_one_holevo_none_for_unitary():
    assert rank_one_holevo(KrausRep(2, 2, (np.eye(2),))) is None


# ---------------------------------------------------------------------------
# predicates, rank, superoperator
# ---------------------------------------------------------------------------


def test_unitary_conjugation_tp_and_unital():
    u = _haar(9, 3)
    k = KrausRep(3, 3, (u,))
    assert is_trace_preserving(k)
    assert is_unital(k)


def test_trace_map_predicates():
    # T -> tr(T) |e1><e1| on M2; its dual is unital but not trace preserving
    ops = (np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([[0.0, 1.0], [0.0, 0.0]]))
    k = KrausRep(2, 2, ops)
    assert is_trace_preserving(k)
    assert not is_unital(k)
    assert is_unital(dual(k))
    assert not is_trace_preserving(dual(k))


def test_holevo_channel_trace_preserving():
    # effects summing to the identity with proper states give a channel
    e = np.eye(2)
    pairs = (
        (np.outer(e[:, 0], e[:, 0]), np.eye(2) / 2),
        (np.outer(e[:, 1], e[:, 1]), np.diag([1.0, 0.0])),
    )
    k = holevo_to_kraus(HolevoForm(2, 2, pairs))
    assert is_trace_preserving(k)


def test_choi_rank_values():
    assert choi_rank(KrausRep(2, 2, (_haar(10, 2),))) == 1
    assert choi_rank(holevo_to_kraus(repeated_preparation_form())) == 3
    assert choi_rank(zoo.pinching(4)) == 4


def test_choi_rank_invariant_under_unitary_mixing():
    k = zoo.random_channel(2, 2, 3, seed=11)
    u = _haar(12, 3)
    mixed = KrausRep(
        2, 2, tuple(sum(u[i, j] * k.ops[j] for j in range(3)) for i in range(3))
    )
    assert choi_rank(mixed) == choi_rank(k) == 3
    np.testing.assert_allclose(
        choi_from_kraus(mixed).mat, choi_from_kraus(k).mat, atol=1e-9
    )


def test_superop_matches_apply():
    rng = np.random.default_rng(13)
    k = zoo.random_channel(3, 2, 2, seed=14)
    s = superop_from_kraus(k)
    for _ in range(5):
        t = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        np.testing.assert_allclose(
            s @ vec(t), vec(apply(k, t)), atol=1e-10
        )


def test_compose_matches_superop_product():
    k1 = zoo.random_channel(2, 3, 2, seed=15)
    k2 = zoo.random_channel(3, 2, 2, seed=16)
    comp = compose(k2, k1)
    np.testing.assert_allclose(
        superop_from_kraus(comp), superop_from_kraus(k2) @ superop_from_kraus(k1),
        atol=1e-10,
    )
