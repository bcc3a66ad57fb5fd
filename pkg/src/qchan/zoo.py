"""Constructors for the channel families used as fixtures and CLI generators.

All constructors are pure; the random generators take an explicit seed and
draw from a named PRNG (numpy PCG64) in a fixed order, so the same seed
always reproduces the same channel bit for bit.
"""

from __future__ import annotations

import numpy as np

from . import matcore
from .errors import DimensionMismatchError, ParameterError
from .matcore import Tolerance, dagger, default_tolerance, frobenius, matrix_unit
from .reprs import ChoiMatrix, HolevoForm, KrausRep, kraus_from_choi

__all__ = [
    "PRNG_NAME",
    "flip_operator",
    "schur_map",
    "schur_complement_map",
    "werner_holevo",
    "phi_lambda",
    "pinching",
    "ad_operator",
    "direct_sum_pure",
    "cstar_extreme_gen",
    "random_channel",
    "random_degradable_seb",
    "random_seb_violator",
]

PRNG_NAME = "numpy-pcg64"


def flip_operator(d: int) -> np.ndarray:
    """Swap operator F(x (x) y) = y (x) x on C^d (x) C^d."""
    f = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def _entangled_vector(d: int) -> np.ndarray:
    """Unnormalised sum_j e_j (x) e_j."""
    v = np.zeros(d * d, dtype=complex)
    for j in range(d):
        v[j * d + j] = 1.0
    return v


def schur_map(a: np.ndarray, tol: Tolerance | None = None) -> KrausRep:
    """Entrywise multiplier channel T -> a (.) T for PSD a.

    The Kraus operators are the diagonal matrices built from the rows of
    the Gram factor B with B* B = a^T; a Hermitian square root is used so
    singular multipliers are handled.
    """
    tol = tol or default_tolerance()
    a = matcore.as_matrix(a)
    b = matcore.psd_sqrt(a.T, tol)
    d = a.shape[0]
    ops = tuple(np.diag(b[k, :]) for k in range(d))
    return KrausRep(d, d, ops)


def schur_complement_map(
    a: np.ndarray, tol: Tolerance | None = None, *, vectors: list[np.ndarray] | None = None
) -> KrausRep:
    """The measure-and-prepare channel complementary to :func:`schur_map`.

    Acts as X -> sum_j <e_j, X e_j> |conj(w_j)><conj(w_j)| where {w_j} is a
    Gram family of a (that is, <w_i, w_j> = a[i, j]). By default the family
    comes from the Hermitian Gram factor, which matches the complement of
    :func:`schur_map` up to a connecting isometry; passing an explicit
    family pins the output vectors exactly.
    """
    tol = tol or default_tolerance()
    a = matcore.as_matrix(a)
    d = a.shape[0]
    if vectors is None:
        b = matcore.psd_sqrt(a.T, tol)
        vectors = [np.conj(b[:, j]) for j in range(d)]
    else:
        if len(vectors) != d:
            raise ParameterError(f"need {d} Gram vectors, got {len(vectors)}")
        vectors = [np.asarray(v, dtype=complex) for v in vectors]
        if not matcore.is_psd(a, tol):
            raise ParameterError("multiplier matrix must be PSD")
    d_out = vectors[0].shape[0]
    ops = []
    for j, w in enumerate(vectors):
        op = np.zeros((d_out, d), dtype=complex)
        op[:, j] = np.conj(w)
        ops.append(op)
    return KrausRep(d, d_out, tuple(ops))


def werner_holevo(d: int, lam: float, tol: Tolerance | None = None) -> KrausRep:
    """The family X -> (tr(X) I - lam X^T) / (d - lam) on M_d.

    Complete positivity requires lam in [-1, 1]; the maps are entanglement
    breaking only for lam <= 1/d. The Kraus family comes from the
    eigendecomposition of the Choi matrix (I - lam F) / (d - lam).
    """
    tol = tol or default_tolerance()
    if d < 2:
        raise ParameterError("dimension must be at least 2")
    if not (-1.0 <= lam <= 1.0):
        raise ParameterError(f"lambda {lam} outside the completely positive range [-1, 1]")
    choi = (np.eye(d * d, dtype=complex) - lam * flip_operator(d)) / (d - lam)
    return kraus_from_choi(ChoiMatrix(d, d, choi), tol)


def phi_lambda(d: int, lam: float, tol: Tolerance | None = None) -> KrausRep:
    """The family X -> (tr(X) I + lam (X + X^T)) / (2 lam + d) on M_d.

    Admissible range lam in [-1/(d+1), 1]. The Choi matrix is derived from
    the map formula, which carries the 1/(2 lam + d) normalisation, rather
    than from any unnormalised expression:
    C = (I + lam (P + F)) / (2 lam + d) with P the unnormalised maximally
    entangled projector.
    """
    tol = tol or default_tolerance()
    if d < 2:
        raise ParameterError("dimension must be at least 2")
    if not (-1.0 / (d + 1) <= lam <= 1.0):
        raise ParameterError(
            f"lambda {lam} outside the admissible range [{-1.0 / (d + 1)}, 1]"
        )
    omega = _entangled_vector(d)
    p = np.outer(omega, np.conj(omega))
    choi = (np.eye(d * d, dtype=complex) + lam * (p + flip_operator(d))) / (2 * lam + d)
    return kraus_from_choi(ChoiMatrix(d, d, choi), tol)


def pinching(d: int) -> KrausRep:
    """Diagonal-projection channel with Kraus family {E_ii}."""
    if d < 1:
        raise ParameterError("dimension must be positive")
    return KrausRep(d, d, tuple(matrix_unit(d, i, i) for i in range(d)))


def ad_operator(a: np.ndarray) -> KrausRep:
    """Single-Kraus map T -> a T a*."""
    a = matcore.as_matrix(a)
    return KrausRep(a.shape[1], a.shape[0], (a,))


def direct_sum_pure(vs: list[np.ndarray]) -> tuple[KrausRep, KrausRep]:
    """Block direct sum of pure maps plus its block-trace degrading map.

    Each V_i is d x d_i; the channel has Kraus operators W_i* where
    W_i = [0 ... V_i ... 0]. The returned second map Gamma reads out the
    block traces, and satisfies Gamma o Phi = Phi_c for the complement
    built from exactly this Kraus family (the cross blocks vanish because
    W_j W_i* = 0 for i != j).
    """
    mats = [matcore.as_matrix(v) for v in vs]
    if not mats:
        raise DimensionMismatchError("need at least one block")
    d = mats[0].shape[0]
    if any(m.shape[0] != d for m in mats):
        raise DimensionMismatchError("all blocks must share the input dimension")
    widths = [m.shape[1] for m in mats]
    total = sum(widths)

    ops = []
    offset = 0
    for m, w in zip(mats, widths):
        block = np.zeros((total, d), dtype=complex)
        block[offset : offset + w, :] = dagger(m)
        ops.append(block)
        offset += w
    channel = KrausRep(d, total, tuple(ops))

    gamma_ops = []
    offset = 0
    for i, w in enumerate(widths):
        for s in range(w):
            g = np.zeros((len(mats), total), dtype=complex)
            g[i, offset + s] = 1.0
            gamma_ops.append(g)
        offset += w
    gamma = KrausRep(total, len(mats), tuple(gamma_ops))
    return channel, gamma


def cstar_extreme_gen(
    us: list[np.ndarray], vs: list[np.ndarray], tol: Tolerance | None = None
) -> KrausRep:
    """Extreme unital measure-and-prepare map sum_i <u_i, X u_i> |v_i><v_i|.

    Requires unit vectors u_i in the input space and an orthonormal basis
    {v_i} of the output space; the result has Choi rank equal to the output
    dimension.
    """
    tol = tol or default_tolerance()
    if len(us) != len(vs):
        raise ParameterError("need as many measurement vectors as basis vectors")
    us = [np.asarray(u, dtype=complex) for u in us]
    vs = [np.asarray(v, dtype=complex) for v in vs]
    d_out = len(vs)
    if any(v.shape[0] != d_out for v in vs):
        raise ParameterError("output basis vectors must span a space of matching dimension")
    vmat = np.stack(vs, axis=1)
    if frobenius(dagger(vmat) @ vmat - np.eye(d_out)) > 100 * tol.eps_eq:
        raise ParameterError("output vectors are not orthonormal within tolerance")
    for u in us:
        if abs(np.linalg.norm(u) - 1.0) > 100 * tol.eps_eq:
            raise ParameterError("measurement vectors must be unit vectors")
    d_in = us[0].shape[0]
    ops = tuple(np.outer(v, np.conj(u)) for u, v in zip(us, vs))
    return KrausRep(d_in, d_out, ops)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


def _haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(rng, d, d))
    phases = np.diag(r).copy()
    phases = phases / np.abs(phases)
    return q * phases


def random_channel(d_in: int, d_out: int, cr: int, seed: int) -> KrausRep:
    """Seeded random trace-preserving channel with the given Choi rank.

    Draws cr Ginibre Kraus operators and right-normalises them; generic
    draws have exactly the requested rank. Requires cr <= d_in * d_out and
    cr * d_out >= d_in (otherwise no trace-preserving channel exists).
    """
    if not (1 <= cr <= d_in * d_out):
        raise ParameterError(f"Choi rank {cr} outside [1, {d_in * d_out}]")
    if cr * d_out < d_in:
        raise ParameterError("cr * d_out < d_in admits no trace-preserving channel")
    rng = np.random.default_rng(seed)
    ops = [_ginibre(rng, d_out, d_in) for _ in range(cr)]
    s = sum(dagger(op) @ op for op in ops)
    vals, vecs = np.linalg.eigh(s)
    inv_sqrt = (vecs / np.sqrt(vals)) @ dagger(vecs)
    return KrausRep(d_in, d_out, tuple(op @ inv_sqrt for op in ops))


def _partition(rng: np.random.Generator, total: int, parts: int) -> list[int]:
    sizes = [1] * parts
    for _ in range(total - parts):
        sizes[int(rng.integers(parts))] += 1
    return sizes


def random_degradable_seb(
    d_in: int, d_out: int, classes: int, seed: int
) -> HolevoForm:
    """Seeded rank-one Holevo form that passes the orthogonality test.

    Each class gets an own direction in the input space (pairwise linearly
    independent) and prepares states supported on its own slice of a random
    orthonormal output basis, so merged states of distinct classes have
    vanishing products by construction.
    """
    if not (1 <= classes <= d_out):
        raise ParameterError(f"need 1 <= classes <= d_out, got {classes} vs {d_out}")
    if d_in == 1 and classes > 1:
        raise ParameterError("a one-dimensional input space admits only one direction")
    rng = np.random.default_rng(seed)
    basis = _haar_unitary(rng, d_out)
    sizes = _partition(rng, d_out, classes)

    directions = []
    while len(directions) < classes:
        cand = _ginibre(rng, d_in, 1)[:, 0]
        cand = cand / np.linalg.norm(cand)
        if all(abs(np.vdot(cand, u)) < 0.99 for u in directions):
            directions.append(cand)

    pairs = []
    offset = 0
    for k in range(classes):
        span = basis[:, offset : offset + sizes[k]]
        offset += sizes[k]
        members = int(rng.integers(1, 3))
        for _ in range(members):
            lam = 0.5 + rng.random()
            phase = np.exp(2j * np.pi * rng.random())
            u = lam * phase * directions[k]
            g = _ginibre(rng, sizes[k], sizes[k])
            rho = g @ dagger(g)
            rho = rho / np.trace(rho).real
            r = span @ rho @ dagger(span)
            pairs.append((np.outer(u, np.conj(u)), r))
    return HolevoForm(d_in, d_out, tuple(pairs))


def random_seb_violator(d_in: int, d_out: int, classes: int, seed: int) -> HolevoForm:
    """Like :func:`random_degradable_seb` but with one orthogonality broken.

    One prepared state is replaced by a superposition straddling the
    supports of two distinct classes, so the orthogonality test fails with
    a violation of order one. Requires classes >= 2 (and hence d_out >= 2).
    """
    if classes < 2:
        raise ParameterError("a violator needs at least two classes")
    base = random_degradable_seb(d_in, d_out, classes, seed)
    rng = np.random.default_rng(seed + 0x7F)
    # Replay the base generator's draws to recover its basis and partition.
    replay = np.random.default_rng(seed)
    basis = _haar_unitary(replay, d_out)
    sizes = _partition(replay, d_out, classes)
    q_a = basis[:, 0]
    q_b = basis[:, sizes[0]]
    xi = (q_a + q_b) / np.sqrt(2.0)
    broken = list(base.pairs)
    idx = int(rng.integers(len(broken)))
    f, _ = broken[idx]
    broken[idx] = (f, np.outer(xi, np.conj(xi)))
    return HolevoForm(d_in, d_out, tuple(broken))
