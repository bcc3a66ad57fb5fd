"""Complementary channels, minimal complements and connecting isometries.

For a channel with Kraus family {A_j}, the canonical complement is

    Phi_c(T) = sum_ij tr(A_i T A_j*) E_ij

on an environment of dimension len(ops). Its Kraus operators are
materialised explicitly (environment-side slices of the canonical
Stinespring dilation) so downstream code sees a uniform KrausRep. Built
from a minimal Kraus family the construction yields the minimal
complement; every other complement of the same channel is an isometric
conjugation of it, and that isometry is what the verification operations
recover.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore, reprs
from .certificates import Certificate, Verdict
from .errors import DimensionMismatchError
from .matcore import Tolerance, dagger, default_tolerance, frobenius, matrix_unit
from .reprs import KrausRep, StinespringRep, apply, choi_from_kraus, kraus_from_choi

__all__ = [
    "ComplementPair",
    "complement_pair",
    "complement_from_kraus",
    "minimal_complement",
    "connecting_isometry",
    "is_complementary_pair",
    "is_self_complementary",
]


@dataclass(frozen=True)
class ComplementPair:
    """A channel, one of its complements, and the dilation witnessing both."""

    channel: KrausRep
    complement: KrausRep
    joint_stinespring: StinespringRep


def complement_from_kraus(k: KrausRep) -> KrausRep:
    """Canonical complement T -> sum_ij tr(A_i T A_j*) E_ij.

    The output space has dimension len(k.ops); the returned Kraus operators
    B_r (one per output dimension of k) satisfy B_r[j, c] = A_j[r, c].
    """
    stacked = np.stack(k.ops)  # (num_ops, d_out, d_in)
    ops = tuple(stacked[:, r, :] for r in range(k.d_out))
    return KrausRep(k.d_in, k.num_ops, ops)


def complement_pair(k: KrausRep) -> ComplementPair:
    """Bundle a channel with its canonical complement and joint dilation."""
    return ComplementPair(k, complement_from_kraus(k), reprs.stinespring_from_kraus(k))


def minimal_complement(k: KrausRep, tol: Tolerance | None = None) -> KrausRep:
    """Complement built from the minimal Kraus family; env dim equals the Choi rank."""
    tol = tol or default_tolerance()
    minimal = kraus_from_choi(choi_from_kraus(k), tol)
    return complement_from_kraus(minimal)


def _env_slices(s: StinespringRep) -> np.ndarray:
    """The dilation as an (env, d_out * d_in) matrix of environment slices."""
    t = s.a.reshape(s.d_out, s.env_dim, s.d_in)
    return t.transpose(1, 0, 2).reshape(s.env_dim, s.d_out * s.d_in)


def connecting_isometry(
    s1: StinespringRep, s2: StinespringRep, tol: Tolerance | None = None
) -> np.ndarray | None:
    """Isometry V with s2.a = (I_{d_out} (x) V) s1.a, or None when unrelated.

    Both inputs must dilate maps with the same input and output spaces and
    env_dim(s1) <= env_dim(s2). The determined block of V is solved on the
    row span of s1's environment slices; the remaining columns are
    completed to an isometry through a QR-derived orthonormal basis, which
    is valid because the connecting isometry is unique only up to such a
    completion.
    """
    tol = tol or default_tolerance()
    if (s1.d_in, s1.d_out) != (s2.d_in, s2.d_out):
        raise DimensionMismatchError("Stinespring representations act between different spaces")
    if s1.env_dim > s2.env_dim:
        raise DimensionMismatchError("env_dim(s1) must not exceed env_dim(s2)")
    m1 = _env_slices(s1)
    m2 = _env_slices(s2)
    e1, e2 = s1.env_dim, s2.env_dim

    u, sv, wh = np.linalg.svd(m1, full_matrices=True)
    smax = sv.max(initial=0.0)
    r = int(np.count_nonzero(sv > tol.eps_rank * smax)) if smax > 0 else 0
    if r == 0:
        return None
    b = m2 @ dagger(wh[:r, :]) / sv[:r]
    v = b @ dagger(u[:, :r])
    if r < e1:
        # Free directions: complete with an orthonormal family orthogonal
        # to the determined columns.
        q, _ = np.linalg.qr(np.hstack([b, np.eye(e2)]))
        comp = q[:, r : r + (e1 - r)]
        v = v + comp @ dagger(u[:, r:e1])

    scale = max(1.0, frobenius(m2))
    if frobenius(v @ m1 - m2) > 10.0 * tol.eps_eq * scale:
        return None
    if frobenius(dagger(v) @ v - np.eye(e1)) > 10.0 * tol.eps_eq:
        return None
    return v


def _unitary_intertwiner(
    ms: list[np.ndarray], ns: list[np.ndarray], tol: Tolerance
) -> np.ndarray | None:
    """Unitary u with u M_k u* = N_k for all k, or None.

    For unitary u the quadratic equation is equivalent to the linear
    intertwining relation u M_k = N_k u, so the solution is found in the
    null space of the stacked Sylvester operators. A seeded generic null
    vector is polar-corrected to a unitary and then verified; when a
    unitary solution exists the generic element of the solution space is
    invertible, so a couple of draws suffice.
    """
    r = ms[0].shape[0]
    rows = []
    eye = np.eye(r)
    for m_k, n_k in zip(ms, ns):
        rows.append(np.kron(m_k.T, eye) - np.kron(eye, n_k))
    stacked = np.vstack(rows)
    _, sv, wh = np.linalg.svd(stacked, full_matrices=True)
    smax = sv.max(initial=0.0)
    cutoff = max(smax, 1.0) * 1e-7
    null_idx = [i for i in range(r * r) if i >= len(sv) or sv[i] <= cutoff]
    if not null_idx:
        return None
    basis = [wh[i, :].conj() for i in null_idx]

    scale = max(1.0, max(frobenius(n_k) for n_k in ns))
    for seed in range(3):
        rng = np.random.default_rng(0xC0FFEE + seed)
        coeff = rng.normal(size=len(basis)) + 1j * rng.normal(size=len(basis))
        cand = reprs.unvec(sum(c * w for c, w in zip(coeff, basis)), r, r)
        p, _, qh = np.linalg.svd(cand)
        u = p @ qh
        residual = max(
            frobenius(u @ m_k @ dagger(u) - n_k) for m_k, n_k in zip(ms, ns)
        )
        if residual <= 1e3 * tol.eps_eq * scale:
            return u
    return None


def is_complementary_pair(
    phi: KrausRep, psi: KrausRep, tol: Tolerance | None = None
) -> Certificate:
    """Decide whether psi is complementary to phi; carries the isometry on success.

    The check runs through the minimal complement: psi is complementary to
    phi exactly when psi = V Phi_c_min(.) V* for an isometry V from the
    minimal environment into psi's output space. The candidate V is
    recovered by compressing psi onto the support of psi(I) and solving for
    the unitary part; the final verdict always re-verifies the Choi-level
    equation choi(psi) = (I (x) V) choi(Phi_c_min) (I (x) V)*.
    """
    tol = tol or default_tolerance()
    if phi.d_in != psi.d_in:
        return Certificate(
            "ComplementaryPair",
            Verdict.FALSE,
            witness={"obstruction": "input dimensions differ"},
            tolerances=tol,
            provenance=("definition: complementary maps share the input space",),
        )

    minimal = kraus_from_choi(choi_from_kraus(phi), tol)
    comp = complement_from_kraus(minimal)
    r = comp.d_out

    n_mat = apply(psi, np.eye(phi.d_in))
    vals, vecs = matcore.eig_hermitian(n_mat, _scaled_eq(tol, n_mat))
    top = vals.max(initial=0.0)
    keep = [i for i, lam in enumerate(vals) if top > 0 and lam > tol.eps_rank * top]
    if len(keep) != r:
        return Certificate(
            "ComplementaryPair",
            Verdict.FALSE,
            witness={
                "obstruction": "support rank of psi(I) differs from the Choi rank of phi",
                "complement_rank": r,
                "psi_support_rank": len(keep),
            },
            tolerances=tol,
            provenance=("minimal complement has output rank equal to the Choi rank",),
        )
    u_n = vecs[:, keep]

    basis = [matrix_unit(phi.d_in, i, j) for i in range(phi.d_in) for j in range(phi.d_in)]
    ms = [apply(comp, e) for e in basis]
    ns = [dagger(u_n) @ apply(psi, e) @ u_n for e in basis]
    u = _unitary_intertwiner(ms, ns, tol)
    if u is None:
        return Certificate(
            "ComplementaryPair",
            Verdict.FALSE,
            witness={"obstruction": "no isometry conjugates the minimal complement onto psi"},
            tolerances=tol,
            provenance=("complements are unique up to an isometry",),
        )
    v = u_n @ u

    c_psi = choi_from_kraus(psi).mat
    c_comp = choi_from_kraus(comp).mat
    lift = np.kron(np.eye(phi.d_in), v)
    residual = frobenius(c_psi - lift @ c_comp @ dagger(lift)) / max(1.0, frobenius(c_psi))
    witness = {"isometry": v, "residual": residual, "complement_rank": r}
    provenance = (
        "psi = Ad_{V*} o Phi_c_min for an isometry V",
        "verified on the Choi matrices",
    )
    if residual <= 10.0 * tol.eps_eq:
        verdict = Verdict.TRUE
    elif residual <= np.sqrt(tol.eps_eq):
        # Between the equality tolerance and its square root the failure may
        # be numerical noise rather than a structural obstruction.
        verdict = Verdict.INDETERMINATE
        witness["reason"] = "residual in the indeterminate band"
    else:
        verdict = Verdict.FALSE
        witness["obstruction"] = "Choi residual too large"
    return Certificate("ComplementaryPair", verdict, witness, tol, provenance)


def _scaled_eq(tol: Tolerance, m: np.ndarray) -> Tolerance:
    scale = max(1.0, frobenius(m))
    return Tolerance(tol.eps_rank, tol.eps_psd * scale, tol.eps_eq * scale)


def is_self_complementary(phi: KrausRep, tol: Tolerance | None = None) -> Certificate:
    """Whether phi is complementary to itself."""
    tol = tol or default_tolerance()
    inner = is_complementary_pair(phi, phi, tol)
    return Certificate(
        "SelfComplementary",
        inner.verdict,
        inner.witness,
        tol,
        inner.provenance + ("self-complementarity: phi complementary to phi",),
    )
