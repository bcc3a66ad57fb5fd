"""Dense complex linear algebra used by every other module.

All operators are plain ``numpy.ndarray`` matrices with explicit shapes; no
channel semantics live here. Functions are pure and never mutate their
arguments.

Conventions fixed here and relied on everywhere else:

* bipartite spaces are indexed row-major as ``(first, second)``, i.e. a
  matrix on C^{da} (x) C^{db} has row index ``a * db + b``;
* eigenvalues are returned sorted descending, with each eigenvector's phase
  fixed by making its first non-negligible component real positive, so that
  certificates are reproducible run to run;
* rank cutoffs are relative to the largest singular value.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NotHermitianError, NotPsdError

__all__ = [
    "Tolerance",
    "default_tolerance",
    "set_default_tolerance",
    "as_matrix",
    "dagger",
    "frobenius",
    "matrix_unit",
    "kron",
    "partial_trace",
    "partial_transpose",
    "eig_hermitian",
    "rank_tol",
    "is_psd",
    "is_hermitian",
    "schur_product",
    "trace_norm",
    "psd_sqrt",
]

_TOL_CAP = 1e-3


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds used by every tolerance-aware operation.

    eps_rank: relative singular-value cutoff for numerical rank.
    eps_psd: allowance on negative eigenvalues in positivity checks.
    eps_eq: entrywise / Frobenius threshold for equality checks.

    All three must be strictly positive and at most 1e-3.
    """

    eps_rank: float = 1e-9
    eps_psd: float = 1e-9
    eps_eq: float = 1e-9

    def __post_init__(self):
        for name in ("eps_rank", "eps_psd", "eps_eq"):
            val = getattr(self, name)
            if not (0.0 < val <= _TOL_CAP):
                raise ValueError(f"{name} must be in (0, {_TOL_CAP}], got {val}")


def _tolerance_from_env() -> Tolerance:
    eps_eq = float(os.environ.get("QCHAN_TOL_EQ", 1e-9))
    return Tolerance(eps_eq=eps_eq)


_DEFAULT_TOL = _tolerance_from_env()


def default_tolerance() -> Tolerance:
    """Return the process-wide default tolerance.

    Initialised from the ``QCHAN_TOL_EQ`` environment variable when set.
    """
    return _DEFAULT_TOL


def set_default_tolerance(tol: Tolerance) -> None:
    """Replace the process-wide default tolerance."""
    global _DEFAULT_TOL
    _DEFAULT_TOL = tol


def as_matrix(m: np.ndarray) -> np.ndarray:
    """Coerce to a 2-d complex array and reject non-finite entries."""
    out = np.asarray(m, dtype=complex)
    if out.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got ndim={out.ndim}")
    if out.size and not np.all(np.isfinite(out)):
        raise ValueError("matrix contains NaN or Inf entries")
    return out


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(m).T


def frobenius(m: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(m))


def matrix_unit(d: int, i: int, j: int) -> np.ndarray:
    """The d x d matrix unit E_ij (1 at row i, column j, zero elsewhere)."""
    out = np.zeros((d, d), dtype=complex)
    out[i, j] = 1.0
    return out


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with dims (a.rows * b.rows, a.cols * b.cols)."""
    return np.kron(as_matrix(a), as_matrix(b))


def _split_dims(m: np.ndarray, dims: tuple[int, int]) -> tuple[int, int]:
    da, db = int(dims[0]), int(dims[1])
    if da <= 0 or db <= 0:
        raise DimensionMismatchError(f"factor dimensions must be positive, got {dims}")
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] != da * db:
        raise DimensionMismatchError(
            f"matrix of size {m.shape[0]} does not factor as {da} x {db}"
        )
    return da, db


def partial_trace(m: np.ndarray, dims: tuple[int, int], side: str) -> np.ndarray:
    """Trace out one tensor factor of a matrix on C^{da} (x) C^{db}.

    side='second' returns the da x da matrix sum_k (I (x) <k|) m (I (x) |k>);
    side='first' is the analogous db x db contraction over the first factor.
    """
    m = as_matrix(m)
    da, db = _split_dims(m, dims)
    t = m.reshape(da, db, da, db)
    if side == "second":
        return np.einsum("abcb->ac", t)
    if side == "first":
        return np.einsum("abac->bc", t)
    raise ValueError(f"side must be 'first' or 'second', got {side!r}")


def partial_transpose(m: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    """Transpose the first tensor factor: block (i,j) of the output is block (j,i)."""
    m = as_matrix(m)
    da, db = _split_dims(m, dims)
    t = m.reshape(da, db, da, db)
    return np.ascontiguousarray(t.transpose(2, 1, 0, 3)).reshape(da * db, da * db)


def is_hermitian(m: np.ndarray, tol: Tolerance | None = None) -> bool:
    """Whether the Hermiticity defect ||m - m*||_F is below eps_eq (scale-guarded)."""
    tol = tol or default_tolerance()
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, frobenius(m))
    return frobenius(m - dagger(m)) <= tol.eps_eq * scale


def eig_hermitian(
    m: np.ndarray, tol: Tolerance | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with real eigenvalues sorted
    descending and eigenvectors as the corresponding columns. Each
    eigenvector phase is fixed by making its first non-negligible component
    real positive. Raises NotHermitianError when the Hermiticity defect
    exceeds eps_eq; below that the input is symmetrised before
    decomposition.
    """
    tol = tol or default_tolerance()
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        raise NotHermitianError("input is not Hermitian within eps_eq")
    herm = (m + dagger(m)) / 2.0
    vals, vecs = np.linalg.eigh(herm)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        mags = np.abs(col)
        peak = mags.max()
        if peak == 0.0:
            continue
        idx = int(np.argmax(mags > 1e-8 * peak))
        pivot = col[idx]
        if abs(pivot) > 0:
            vecs[:, k] = col * (np.conj(pivot) / abs(pivot))
    return vals, vecs


def rank_tol(m: np.ndarray, tol: Tolerance | None = None) -> int:
    """Numerical rank: singular values above eps_rank times the largest one.

    The zero matrix has rank 0. The cutoff is relative so that globally
    rescaling a matrix never changes the verdict.
    """
    tol = tol or default_tolerance()
    m = as_matrix(m)
    if m.size == 0:
        return 0
    svals = np.linalg.svd(m, compute_uv=False)
    smax = svals.max(initial=0.0)
    if smax == 0.0:
        return 0
    return int(np.count_nonzero(svals > tol.eps_rank * smax))


def is_psd(m: np.ndarray, tol: Tolerance | None = None) -> bool:
    """Whether m is Hermitian within eps_eq with min eigenvalue >= -eps_psd.

    The input is symmetrised before the eigendecomposition only when its
    Hermiticity defect is already below eps_eq; a larger defect fails the
    check outright instead of being silently repaired.
    """
    tol = tol or default_tolerance()
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m, tol):
        return False
    herm = (m + dagger(m)) / 2.0
    vals = np.linalg.eigvalsh(herm)
    return bool(vals.min(initial=0.0) >= -tol.eps_psd)


def schur_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Entrywise (Hadamard) product of two same-shaped matrices."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    return a * b


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values of a square matrix."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    return float(np.linalg.svd(m, compute_uv=False).sum())


def psd_sqrt(m: np.ndarray, tol: Tolerance | None = None) -> np.ndarray:
    """Hermitian square root of a PSD matrix.

    Works for singular inputs (negative rounding noise is clamped to zero),
    which is why this is used instead of a Cholesky factor for Gram
    factorisations.
    """
    tol = tol or default_tolerance()
    m = as_matrix(m)
    scale = max(1.0, frobenius(m))
    scaled = Tolerance(tol.eps_rank, tol.eps_psd * scale, tol.eps_eq * scale)
    if not is_psd(m, scaled):
        raise NotPsdError("matrix is not PSD within tolerance")
    vals, vecs = np.linalg.eigh((m + dagger(m)) / 2.0)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ dagger(vecs)
