"""Channel representations (Kraus, Choi, Stinespring, Holevo) and conversions.

The library fixes the Schroedinger picture as primary: a channel maps
input-space density operators to output-space ones, T -> sum_j A_j T A_j*.
The Heisenberg-side map is available through :func:`dual`.

Tensor ordering is input-system (x) output-system everywhere: the Choi
matrix is C = sum_ij E_ij (x) Phi(E_ij), with block (i,j) of size
d_out x d_out equal to Phi(E_ij). This single convention drives all
vectorisation and reshaping below; do not mix in another one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import DimensionMismatchError, NotPsdError
from .matcore import Tolerance, as_matrix, dagger, default_tolerance, frobenius

__all__ = [
    "KrausRep",
    "ChoiMatrix",
    "StinespringRep",
    "HolevoForm",
    "apply",
    "compose",
    "dual",
    "choi_from_kraus",
    "kraus_from_choi",
    "stinespring_from_kraus",
    "kraus_from_stinespring",
    "holevo_to_kraus",
    "rank_one_holevo",
    "is_trace_preserving",
    "is_unital",
    "choi_rank",
    "superop_from_kraus",
    "vec",
    "unvec",
]


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorisation; index of entry (r, c) is r + c * rows."""
    return np.asarray(m, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Inverse of :func:`vec` for a rows x cols matrix."""
    return np.asarray(v, dtype=complex).reshape((rows, cols), order="F")


@dataclass(frozen=True)
class KrausRep:
    """Schroedinger-picture Kraus representation T -> sum_j A_j T A_j*.

    ops holds d_out x d_in matrices. Exactly-zero operators are dropped on
    construction; an all-zero list is rejected. Trace preservation
    (sum A_j* A_j = I) is a predicate, not a structural requirement.
    """

    d_in: int
    d_out: int
    ops: tuple = field(default=())

    def __post_init__(self):
        if self.d_in <= 0 or self.d_out <= 0:
            raise DimensionMismatchError("d_in and d_out must be positive")
        mats = []
        for op in self.ops:
            op = as_matrix(op)
            if op.shape != (self.d_out, self.d_in):
                raise DimensionMismatchError(
                    f"Kraus operator of shape {op.shape}, expected "
                    f"({self.d_out}, {self.d_in})"
                )
            if frobenius(op) > 0.0:
                mats.append(op)
        if not mats:
            raise ValueError("Kraus list is empty or all zero")
        object.__setattr__(self, "ops", tuple(mats))

    @property
    def num_ops(self) -> int:
        return len(self.ops)


@dataclass(frozen=True)
class ChoiMatrix:
    """Choi matrix sum_ij E_ij (x) Phi(E_ij) with declared (d_in, d_out).

    A completely positive map has a PSD Choi matrix; shape is validated at
    construction while positivity is checked where it matters
    (:func:`kraus_from_choi`, document ingestion).
    """

    d_in: int
    d_out: int
    mat: np.ndarray = None

    def __post_init__(self):
        if self.d_in <= 0 or self.d_out <= 0:
            raise DimensionMismatchError("d_in and d_out must be positive")
        mat = as_matrix(self.mat)
        n = self.d_in * self.d_out
        if mat.shape != (n, n):
            raise DimensionMismatchError(
                f"Choi matrix of shape {mat.shape}, expected ({n}, {n})"
            )
        object.__setattr__(self, "mat", mat)

    def block(self, i: int, j: int) -> np.ndarray:
        """Block (i, j), equal to Phi(E_ij)."""
        d = self.d_out
        return self.mat[i * d : (i + 1) * d, j * d : (j + 1) * d]


@dataclass(frozen=True)
class StinespringRep:
    """Dilation a: C^{d_in} -> C^{d_out} (x) C^{env_dim}.

    The channel is recovered by tracing out the environment (second factor)
    of a T a*; tracing out the output instead yields the complementary map.
    """

    d_in: int
    d_out: int
    env_dim: int
    a: np.ndarray = None

    def __post_init__(self):
        if min(self.d_in, self.d_out, self.env_dim) <= 0:
            raise DimensionMismatchError("all dimensions must be positive")
        a = as_matrix(self.a)
        if a.shape != (self.d_out * self.env_dim, self.d_in):
            raise DimensionMismatchError(
                f"Stinespring operator of shape {a.shape}, expected "
                f"({self.d_out * self.env_dim}, {self.d_in})"
            )
        object.__setattr__(self, "a", a)


@dataclass(frozen=True)
class HolevoForm:
    """Measure-and-prepare form T -> sum_j tr(T F_j) R_j.

    Every effect F_j must be PSD and every R_j a unit-trace state; pairs
    with tr(R) != 1 are rejected rather than renormalised, so forms are
    canonical (rescaling freedom is absorbed into F).
    """

    d_in: int
    d_out: int
    pairs: tuple = field(default=())

    def __post_init__(self):
        tol = default_tolerance()
        if self.d_in <= 0 or self.d_out <= 0:
            raise DimensionMismatchError("d_in and d_out must be positive")
        if not self.pairs:
            raise ValueError("Holevo form needs at least one (F, R) pair")
        checked = []
        for idx, (f, r) in enumerate(self.pairs):
            f = as_matrix(f)
            r = as_matrix(r)
            if f.shape != (self.d_in, self.d_in):
                raise DimensionMismatchError(f"F_{idx} has shape {f.shape}")
            if r.shape != (self.d_out, self.d_out):
                raise DimensionMismatchError(f"R_{idx} has shape {r.shape}")
            if not matcore.is_psd(f, tol):
                raise NotPsdError(f"F_{idx} is not PSD within tolerance")
            if not matcore.is_psd(r, tol):
                raise NotPsdError(f"R_{idx} is not PSD within tolerance")
            if abs(np.trace(r).real - 1.0) > tol.eps_eq or abs(np.trace(r).imag) > tol.eps_eq:
                raise ValueError(f"R_{idx} has trace {np.trace(r)}, expected 1")
            checked.append((f, r))
        object.__setattr__(self, "pairs", tuple(checked))


def apply(k: KrausRep, t: np.ndarray) -> np.ndarray:
    """Evaluate the channel on a d_in x d_in matrix."""
    t = as_matrix(t)
    if t.shape != (k.d_in, k.d_in):
        raise DimensionMismatchError(
            f"operand of shape {t.shape}, expected ({k.d_in}, {k.d_in})"
        )
    out = np.zeros((k.d_out, k.d_out), dtype=complex)
    for op in k.ops:
        out += op @ t @ dagger(op)
    return out


def apply_holevo(h: HolevoForm, t: np.ndarray) -> np.ndarray:
    """Evaluate a Holevo form on a d_in x d_in matrix."""
    t = as_matrix(t)
    out = np.zeros((h.d_out, h.d_out), dtype=complex)
    for f, r in h.pairs:
        out += np.trace(t @ f) * r
    return out


def compose(outer: KrausRep, inner: KrausRep) -> KrausRep:
    """Composite channel outer o inner with the product Kraus family."""
    if inner.d_out != outer.d_in:
        raise DimensionMismatchError(
            f"cannot compose: inner d_out {inner.d_out} != outer d_in {outer.d_in}"
        )
    ops = [b @ a for b in outer.ops for a in inner.ops]
    return KrausRep(inner.d_in, outer.d_out, tuple(ops))


def dual(k: KrausRep) -> KrausRep:
    """Heisenberg-side map X -> sum_j A_j* X A_j, with tr(dual(X) T) = tr(X Phi(T))."""
    return KrausRep(k.d_out, k.d_in, tuple(dagger(op) for op in k.ops))


def choi_from_kraus(k: KrausRep) -> ChoiMatrix:
    """Choi matrix of the channel: sum over vectorised Kraus operators."""
    n = k.d_in * k.d_out
    mat = np.zeros((n, n), dtype=complex)
    for op in k.ops:
        v = vec(op)
        mat += np.outer(v, np.conj(v))
    return ChoiMatrix(k.d_in, k.d_out, mat)


def _fix_global_phase(op: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry real positive, for reproducible output."""
    flat = op.reshape(-1)
    idx = int(np.argmax(np.abs(flat)))
    pivot = flat[idx]
    if abs(pivot) == 0.0:
        return op
    return op * (np.conj(pivot) / abs(pivot))


def kraus_from_choi(c: ChoiMatrix, tol: Tolerance | None = None) -> KrausRep:
    """Minimal Kraus set recovered from a PSD Choi matrix.

    Returns exactly rank_tol(c.mat) operators, built by reshaping the
    scaled eigenvectors back into d_out x d_in matrices consistently with
    :func:`choi_from_kraus`. Eigenvalues below the relative rank cutoff are
    discarded rather than kept as tiny Kraus operators.
    """
    tol = tol or default_tolerance()
    scale = max(1.0, frobenius(c.mat))
    herm_tol = Tolerance(tol.eps_rank, tol.eps_psd * scale, tol.eps_eq * scale)
    if not matcore.is_psd(c.mat, herm_tol):
        raise NotPsdError("Choi matrix is not PSD within tolerance")
    rank = matcore.rank_tol(c.mat, tol)
    if rank == 0:
        raise NotPsdError("Choi matrix is numerically zero; no channel to extract")
    vals, vecs = matcore.eig_hermitian(c.mat, herm_tol)
    ops = []
    for idx in range(rank):
        lam = max(vals[idx], 0.0)
        op = unvec(np.sqrt(lam) * vecs[:, idx], c.d_out, c.d_in)
        ops.append(_fix_global_phase(op))
    return KrausRep(c.d_in, c.d_out, tuple(ops))


def stinespring_from_kraus(k: KrausRep) -> StinespringRep:
    """Canonical dilation a x = sum_j (A_j x) (x) e_j with env_dim = len(ops)."""
    env = k.num_ops
    stacked = np.stack(k.ops)  # (env, d_out, d_in)
    a = stacked.transpose(1, 0, 2).reshape(k.d_out * env, k.d_in)
    return StinespringRep(k.d_in, k.d_out, env, a)


def kraus_from_stinespring(s: StinespringRep) -> KrausRep:
    """Slice the dilation back into env_dim Kraus operators."""
    t = s.a.reshape(s.d_out, s.env_dim, s.d_in)
    ops = tuple(t[:, j, :] for j in range(s.env_dim))
    return KrausRep(s.d_in, s.d_out, ops)


def _spectral_vectors(m: np.ndarray, tol: Tolerance) -> list[np.ndarray]:
    """Vectors v_k with m = sum_k |v_k><v_k| for PSD m, cut at the rank threshold."""
    vals, vecs = matcore.eig_hermitian(m, tol)
    top = vals.max(initial=0.0)
    out = []
    for idx, lam in enumerate(vals):
        if lam > tol.eps_rank * top and lam > 0.0:
            out.append(np.sqrt(lam) * vecs[:, idx])
    return out


def holevo_to_kraus(h: HolevoForm, tol: Tolerance | None = None) -> KrausRep:
    """Rank-one Kraus family |r_b><f_a| from spectral splits of every pair."""
    tol = tol or default_tolerance()
    ops = []
    for f, r in h.pairs:
        fs = _spectral_vectors(f, tol)
        rs = _spectral_vectors(r, tol)
        for fa in fs:
            for rb in rs:
                ops.append(np.outer(rb, np.conj(fa)))
    return KrausRep(h.d_in, h.d_out, tuple(ops))


def _holevo_from_rank_one_ops(
    ops: tuple, d_in: int, d_out: int, tol: Tolerance
) -> HolevoForm | None:
    pairs = []
    for op in ops:
        if matcore.rank_tol(op, tol) != 1:
            return None
        u_left, svals, v_right = np.linalg.svd(op)
        v = svals[0] * u_left[:, 0]
        u = np.conj(v_right[0, :])
        # op = |v><u| with ||u|| = 1; fold the output norm into F.
        f = np.outer(u, np.conj(u)) * (np.vdot(v, v).real)
        r = np.outer(v, np.conj(v)) / np.vdot(v, v).real
        pairs.append((f, r))
    return HolevoForm(d_in, d_out, tuple(pairs))


def rank_one_holevo(k: KrausRep, tol: Tolerance | None = None) -> HolevoForm | None:
    """Holevo form from a rank-one Kraus family, or None.

    The given family is used when all its operators are rank one; otherwise
    the minimal family is tried. Each rank-one operator |v><u| contributes
    the pair (F = ||v||^2 |u><u|, R = |v><v| / ||v||^2).
    """
    tol = tol or default_tolerance()
    form = _holevo_from_rank_one_ops(k.ops, k.d_in, k.d_out, tol)
    if form is not None:
        return form
    minimal = kraus_from_choi(choi_from_kraus(k), tol)
    return _holevo_from_rank_one_ops(minimal.ops, k.d_in, k.d_out, tol)


def is_trace_preserving(k: KrausRep, tol: Tolerance | None = None) -> bool:
    """Whether sum_j A_j* A_j = I within eps_eq."""
    tol = tol or default_tolerance()
    s = sum(dagger(op) @ op for op in k.ops)
    return frobenius(s - np.eye(k.d_in)) <= tol.eps_eq * max(1.0, frobenius(s))


def is_unital(k: KrausRep, tol: Tolerance | None = None) -> bool:
    """Whether sum_j A_j A_j* = I within eps_eq."""
    tol = tol or default_tolerance()
    s = sum(op @ dagger(op) for op in k.ops)
    return frobenius(s - np.eye(k.d_out)) <= tol.eps_eq * max(1.0, frobenius(s))


def choi_rank(k: KrausRep, tol: Tolerance | None = None) -> int:
    """Minimal number of Kraus operators: the numerical rank of the Choi matrix."""
    tol = tol or default_tolerance()
    return matcore.rank_tol(choi_from_kraus(k).mat, tol)


def superop_from_kraus(k: KrausRep) -> np.ndarray:
    """Column-stacking superoperator matrix: vec(Phi(T)) = S vec(T).

    S = sum_j conj(A_j) (x) A_j of shape (d_out^2, d_in^2).
    """
    s = np.zeros((k.d_out**2, k.d_in**2), dtype=complex)
    for op in k.ops:
        s += np.kron(np.conj(op), op)
    return s
