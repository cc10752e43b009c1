"""Dense reference algorithms for testing and small-scale baselines.

The eigendecomposition here is a cyclic Jacobi iteration written from
scratch so that it shares no failure modes with the sparse solver it
checks. Nothing in this module may be called from the production solver
path (enforced by a structural test).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import LaplacianMatrix

__all__ = [
    "dense_eigh",
    "dense_solve",
    "VerificationReport",
    "verify_eigresult",
    "baseline_perturbed",
    "baseline_nullspace_deflated",
]

_MAX_DENSE = 2000


def _check_size(n: int) -> None:
    if n > _MAX_DENSE:
        raise ValueError(f"dense oracle guarded at n <= {_MAX_DENSE}, got {n}")


@njit(cache=True)
def _jacobi_kernel(A: np.ndarray, V: np.ndarray, tol: float) -> int:
    """Cyclic Jacobi sweeps on A in place, accumulating rotations in V.
    Stops when the off-diagonal Frobenius norm drops below tol."""
    n = A.shape[0]
    sweeps = 0
    for _sweep in range(100):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += 2.0 * A[p, q] * A[p, q]
        if np.sqrt(off) <= tol:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                # Classic stable rotation angle.
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                app, aqq = A[p, p], A[q, q]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    if k != p and k != q:
                        akp = A[k, p]
                        akq = A[k, q]
                        A[k, p] = c * akp - s * akq
                        A[p, k] = A[k, p]
                        A[k, q] = s * akp + c * akq
                        A[q, k] = A[k, q]
                for k in range(n):
                    vkp = V[k, p]
                    vkq = V[k, q]
                    V[k, p] = c * vkp - s * vkq
                    V[k, q] = s * vkp + c * vkq
    return sweeps


def dense_eigh(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Full symmetric eigendecomposition by cyclic Jacobi rotations.

    Returns ascending eigenvalues and orthonormal eigenvectors (columns),
    with the largest-magnitude entry of each eigenvector made positive.
    """
    A = np.asarray(A, dtype=np.float64)
    n = A.shape[0]
    _check_size(n)
    if A.shape != (n, n):
        raise ValueError("square matrix required")
    B = 0.5 * (A + A.T)
    fro = np.linalg.norm(B)
    work = B.copy()
    V = np.eye(n)
    _jacobi_kernel(work, V, 1e-12 * max(fro, 1e-300))
    w = np.diag(work).copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    V = V[:, order]
    for j in range(n):
        lead = np.argmax(np.abs(V[:, j]))
        if V[lead, j] < 0:
            V[:, j] = -V[:, j]
    return w, V


def dense_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting."""
    A = np.array(A, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    n = A.shape[0]
    _check_size(n)
    scale = np.max(np.abs(A)) if A.size else 0.0
    for col in range(n):
        piv = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[piv, col]) < 1e-14 * max(scale, 1e-300):
            raise np.linalg.LinAlgError("matrix is singular to working precision")
        if piv != col:
            A[[col, piv]] = A[[piv, col]]
            b[[col, piv]] = b[[piv, col]]
        factors = A[col + 1:, col] / A[col, col]
        A[col + 1:, col:] -= np.outer(factors, A[col, col:])
        b[col + 1:] -= factors * b[col]
    x = np.zeros(n)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - A[row, row + 1:] @ x[row + 1:]) / A[row, row]
    return x


@dataclass
class VerificationReport:
    residuals: np.ndarray
    orthogonality_defect: float
    kernel_defect: float
    max_eigenvalue_error: float | None
    skipped_eigenvalues: list[float]
    ok: bool


def verify_eigresult(
    L: LaplacianMatrix,
    lambdas: np.ndarray,
    vectors: np.ndarray,
    eps: float = 1e-8,
    oracle: bool | None = None,
) -> VerificationReport:
    """Check residuals, pairwise orthogonality, kernel orthogonality, and
    (when the dense oracle is feasible) eigenvalue agreement, ordering, and
    that no eigenvalue in (0, lambda_d] was skipped (with multiplicity)."""
    n = L.n
    d = len(lambdas)
    residuals = np.array([
        np.linalg.norm(L.L @ vectors[:, j] - lambdas[j] * vectors[:, j])
        for j in range(d)
    ])
    gram = vectors.T @ vectors
    orth_defect = float(np.max(np.abs(gram - np.eye(d)))) if d else 0.0
    kernel_defect = float(np.max(np.abs(vectors.sum(axis=0))) / np.sqrt(n)) if d else 0.0

    max_err = None
    skipped: list[float] = []
    if oracle is None:
        oracle = n <= _MAX_DENSE
    if oracle and d:
        w, _ = dense_eigh(L.toarray())
        match_tol = max(1e-6, 10 * eps)
        # Connected graph: w[0] is the kernel zero; the d smallest positive
        # eigenvalues must be matched in order, respecting multiplicity.
        expect = w[1: d + 1]
        errs = np.abs(np.sort(lambdas) - expect)
        skipped = [float(x) for x in expect[errs > match_tol]]
        max_err = float(np.max(errs))

    ok = bool(np.all(residuals <= eps) and not skipped)
    return VerificationReport(
        residuals=residuals,
        orthogonality_defect=orth_defect,
        kernel_defect=kernel_defect,
        max_eigenvalue_error=max_err,
        skipped_eigenvalues=skipped,
        ok=ok,
    )


def baseline_perturbed(L: LaplacianMatrix, tau: float = 1e-8, d: int = 1) -> np.ndarray:
    """Diagonal-perturbation baseline: eigendecompose L + tau I, drop the
    shifted kernel eigenvalue (= tau), and return the next d minus tau."""
    _check_size(L.n)
    if tau <= 0:
        raise ValueError("tau must be positive")
    w, _ = dense_eigh(L.toarray() + tau * np.eye(L.n))
    return w[1: d + 1] - tau


def baseline_nullspace_deflated(L: LaplacianMatrix, d: int = 1) -> np.ndarray:
    """Rank-two-correction baseline: L + e1 e1^T + [e1 1][-e1^T; 1^T]
    displaces the zero eigenvalue out of the small end; the d smallest
    eigenvalues corresponding to positive eigenvalues of L remain."""
    _check_size(L.n)
    n = L.n
    M = L.toarray().copy()
    e1 = np.zeros(n)
    e1[0] = 1.0
    ones = np.ones(n)
    M += np.outer(e1, e1)
    M += np.column_stack([e1, ones]) @ np.vstack([-e1, ones])
    w, V = dense_eigh(M)
    # The displaced kernel direction is the eigenvector closest to ones.
    overlap = np.abs(ones @ V) / np.sqrt(n)
    drop = int(np.argmax(overlap))
    keep = np.delete(np.arange(n), drop)
    return w[keep][:d]
