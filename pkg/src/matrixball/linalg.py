"""Dense complex-matrix helpers for small fixed sizes (m = 2r+b <= ~12).

Matrices are plain numpy ``complex128`` arrays throughout the package; this
module wraps the handful of primitives the rest of the code relies on
(determinant, definiteness test, exponential, phase-fixed QR) behind stable
contracts and package-specific error types. The heavy lifting is delegated to
numpy/scipy LAPACK routines, which at these sizes are effectively exact.
"""

import numpy as np
import scipy.linalg

from .errors import MembershipError

__all__ = [
    "det",
    "is_strictly_positive",
    "expm",
    "qr_unitary",
    "eigh",
    "cond",
]


def det(A) -> complex:
    """Determinant of a square complex matrix via LU with partial pivoting."""
    A = np.asarray(A, dtype=np.complex128)
    if A.shape[-1] != A.shape[-2]:
        raise ValueError("det requires a square matrix")
    return complex(np.linalg.det(A))


def is_strictly_positive(H, pivot_tol: float = 1e-13, herm_tol: float = 1e-12) -> bool:
    """True iff the Hermitian matrix H is strictly positive definite.

    Uses an explicit Cholesky sweep and requires every pivot to exceed
    ``pivot_tol``. Non-Hermitian input (beyond ``herm_tol``) is rejected.
    """
    H = np.asarray(H, dtype=np.complex128)
    scale = max(1.0, float(np.max(np.abs(H)))) if H.size else 1.0
    if np.max(np.abs(H - H.conj().T)) > herm_tol * scale:
        raise MembershipError("is_strictly_positive expects a Hermitian matrix")
    n = H.shape[0]
    L = np.zeros_like(H)
    for j in range(n):
        d = H[j, j].real - np.sum(np.abs(L[j, :j]) ** 2)
        if d <= pivot_tol:
            return False
        L[j, j] = np.sqrt(d)
        for i in range(j + 1, n):
            L[i, j] = (H[i, j] - np.dot(L[i, :j], L[j, :j].conj())) / L[j, j]
    return True


def expm(X):
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    return scipy.linalg.expm(np.asarray(X, dtype=np.complex128))


def qr_unitary(A, mode: str = "reduced"):
    """QR factorization with the diagonal of R made real and positive.

    The phase fix makes the unitary factor a deterministic function of A,
    which is what both Haar sampling and the boundary-coset construction need.
    """
    A = np.asarray(A, dtype=np.complex128)
    Q, R = np.linalg.qr(A, mode=mode)
    k = R.shape[-2] if mode != "complete" else min(A.shape[-2], A.shape[-1])
    d = np.diagonal(R[..., :k, :], axis1=-2, axis2=-1).copy()
    ph = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    Q = Q.copy()
    Q[..., :, :k] = Q[..., :, :k] * ph[..., None, :]
    R = R.copy()
    R[..., :k, :] = R[..., :k, :] * ph.conj()[..., :, None]
    return Q, R


def eigh(H):
    """Eigenvalues and eigenvectors of a Hermitian matrix (diagnostics only)."""
    return np.linalg.eigh(np.asarray(H))


def cond(A) -> float:
    """2-norm condition number."""
    return float(np.linalg.cond(np.asarray(A, dtype=np.complex128)))
