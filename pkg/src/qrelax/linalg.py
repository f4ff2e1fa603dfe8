"""Dense symmetric linear algebra primitives.

Everything works on plain ``numpy`` arrays.  Symmetric operands are
symmetrized at the boundary with :func:`sym`; downstream code may then rely
on exact ``A[i, j] == A[j, i]``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidMatrix, NotPsd

# Scale-relative eigenvalue cutoff: eigenvalues within +-tol of zero are
# treated as zero for splitting, pseudoinversion and PSD classification.
DEFAULT_EIG_TOL = 1e-8


def sym(A) -> np.ndarray:
    """Return the exact symmetric part (A + A^T)/2 as float array."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {A.shape}")
    return (A + A.T) / 2.0


def default_tol(eigenvalues, base: float = DEFAULT_EIG_TOL) -> float:
    """Zero-tolerance relative to the largest eigenvalue magnitude."""
    scale = float(np.max(np.abs(eigenvalues))) if len(eigenvalues) else 0.0
    return base * max(1.0, scale)


def eig_sym(A):
    """Eigendecomposition of a symmetric matrix.

    Returns ``(w, V)`` with eigenvalues ``w`` ascending and orthonormal
    eigenvector columns, so ``A = V @ diag(w) @ V.T``.
    """
    A = sym(A)
    if not np.all(np.isfinite(A)):
        raise InvalidMatrix("matrix has non-finite entries")
    w, V = np.linalg.eigh(A)
    return w, V


@dataclass(frozen=True)
class EigenSplit:
    """Sign-based spectral split Q = L^T L - M^T M.

    ``L`` holds rows sqrt(lam) v^T for eigenvalues above ``zero_tol``, ``M``
    rows sqrt(-lam) v^T for eigenvalues below ``-zero_tol``; rows ordered by
    descending |lam| for determinism.  Near-zero eigenvalues contribute to
    neither factor.
    """

    L: np.ndarray
    M: np.ndarray
    pos_count: int
    neg_count: int
    zero_tol: float

    def reconstruct(self) -> np.ndarray:
        return self.L.T @ self.L - self.M.T @ self.M


def split_signed(A, tol: float | None = None) -> EigenSplit:
    """Split a symmetric matrix by eigenvalue sign."""
    A = sym(A)
    n = A.shape[0]
    w, V = eig_sym(A)
    if tol is None:
        tol = default_tol(w)

    pos = np.where(w > tol)[0]
    neg = np.where(w < -tol)[0]
    # descending magnitude
    pos = pos[np.argsort(-w[pos], kind="stable")]
    neg = neg[np.argsort(w[neg], kind="stable")]

    L = (np.sqrt(w[pos])[:, None] * V[:, pos].T) if len(pos) else np.zeros((0, n))
    M = (np.sqrt(-w[neg])[:, None] * V[:, neg].T) if len(neg) else np.zeros((0, n))
    return EigenSplit(L=L, M=M, pos_count=len(pos), neg_count=len(neg), zero_tol=tol)


def pinv(A, tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a symmetric matrix via eigendecomposition."""
    A = sym(A)
    w, V = eig_sym(A)
    if tol is None:
        tol = default_tol(w)
    inv = np.where(np.abs(w) > tol, 1.0 / np.where(np.abs(w) > tol, w, 1.0), 0.0)
    return sym(V @ np.diag(inv) @ V.T)


def psd_sqrt(A) -> np.ndarray:
    """Symmetric PSD square root.

    Negative eigenvalues above ``-1e-6 * max(1, ||A||_F)`` are clamped to
    zero; anything below raises :class:`NotPsd`.
    """
    A = sym(A)
    w, V = eig_sym(A)
    scale = max(1.0, float(np.linalg.norm(A, "fro")))
    if np.min(w, initial=0.0) < -1e-6 * scale:
        raise NotPsd(f"min eigenvalue {np.min(w):g} below PSD tolerance")
    w = np.clip(w, 0.0, None)
    return sym(V @ np.diag(np.sqrt(w)) @ V.T)


def in_range(Q, c, tol: float = 1e-8) -> bool:
    """True iff c lies in Range(Q), i.e. ||Q Q^+ c - c|| <= tol * max(1, ||c||)."""
    Q = sym(Q)
    c = np.asarray(c, dtype=float)
    if c.shape != (Q.shape[0],):
        raise InvalidMatrix(f"vector length {c.shape} does not match matrix {Q.shape}")
    resid = Q @ (pinv(Q) @ c) - c
    return float(np.linalg.norm(resid)) <= tol * max(1.0, float(np.linalg.norm(c)))
