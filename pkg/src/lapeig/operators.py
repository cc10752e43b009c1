"""Trimmed, shifted, and deflated operator algebra.

The singular Laplacian is handled implicitly: one row/column (the trim
index) is masked during matvecs, converged eigenpairs are deflated by a
rank-c update, and solutions in (n-1)-space are enlarged back to n-space
orthogonally to the all-ones kernel vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import LaplacianMatrix

__all__ = [
    "TrimContext",
    "DeflationSet",
    "ShiftedDeflatedOperator",
    "select_trim_index",
    "restrict",
    "restrict_columns",
    "enlarge_solution",
    "apply_trimmed",
    "deflated_matvec",
    "choose_delta",
]


@dataclass(frozen=True)
class TrimContext:
    """Index i whose row and column are removed from the order-n Laplacian."""

    i: int
    n: int

    def __post_init__(self):
        if not 0 <= self.i < self.n:
            raise ValueError(f"trim index {self.i} out of range for n={self.n}")


def select_trim_index(L: LaplacianMatrix, policy: int | str = "max_degree") -> TrimContext:
    """Pick the trim index.

    ``max_degree`` takes the smallest index attaining the maximum diagonal
    entry (more strictly diagonally dominant rows remain); ``min_degree``
    the smallest index attaining the minimum; an integer fixes the index.
    """
    if isinstance(policy, (int, np.integer)):
        return TrimContext(i=int(policy), n=L.n)
    if policy == "max_degree":
        return TrimContext(i=int(np.argmax(L.diag)), n=L.n)
    if policy == "min_degree":
        return TrimContext(i=int(np.argmin(L.diag)), n=L.n)
    raise ValueError(f"unknown trim policy {policy!r}")


def restrict(v: np.ndarray, trim: TrimContext) -> np.ndarray:
    """Delete entry ``trim.i`` from an n-vector."""
    if v.shape[0] != trim.n:
        raise ValueError(f"expected length {trim.n}, got {v.shape[0]}")
    return np.delete(v, trim.i)


def restrict_columns(V: np.ndarray, trim: TrimContext) -> np.ndarray:
    """Delete row ``trim.i`` from an n-by-c matrix."""
    if V.shape[0] != trim.n:
        raise ValueError(f"expected {trim.n} rows, got {V.shape[0]}")
    return np.delete(V, trim.i, axis=0)


def embed(z_hat: np.ndarray, trim: TrimContext) -> np.ndarray:
    """Insert a zero at position ``trim.i`` of an (n-1)-vector."""
    if z_hat.shape[0] != trim.n - 1:
        raise ValueError(f"expected length {trim.n - 1}, got {z_hat.shape[0]}")
    return np.insert(z_hat, trim.i, 0.0)


def enlarge_solution(z_hat: np.ndarray, trim: TrimContext) -> np.ndarray:
    """Reconstruct the constrained n-space solution from a trimmed solve.

    z* = [z_hat with 0 at i] - (sum(z_hat)/n) * ones, which satisfies
    ones @ z* = 0 up to rounding.
    """
    z = embed(z_hat, trim)
    z -= z_hat.sum() / trim.n
    return z


@dataclass(frozen=True)
class DeflationSet:
    """Converged eigenvalues with orthonormal eigenvectors and the weight
    delta that pushes them out of the small end of the spectrum."""

    lambdas: np.ndarray
    V: np.ndarray
    delta: float

    @classmethod
    def empty(cls, n: int, delta: float = 0.0) -> "DeflationSet":
        return cls(lambdas=np.empty(0), V=np.empty((n, 0)), delta=delta)

    @property
    def c(self) -> int:
        return int(self.V.shape[1])

    def appended(self, lam: float, v: np.ndarray) -> "DeflationSet":
        return DeflationSet(
            lambdas=np.append(self.lambdas, lam),
            V=np.column_stack([self.V, v]),
            delta=self.delta,
        )

    def validate(self, tol: float = 1e-10) -> None:
        n = self.V.shape[0]
        if self.c == 0:
            return
        gram = self.V.T @ self.V
        if np.max(np.abs(gram - np.eye(self.c))) > tol:
            raise ValueError("deflation vectors are not orthonormal")
        if np.max(np.abs(self.V.sum(axis=0))) > tol * np.sqrt(n):
            raise ValueError("deflation vectors are not orthogonal to ones")


def choose_delta(L: LaplacianMatrix) -> float:
    """Deflation weight 2*max(diag(L)); by Gershgorin this clears the
    spectrum while keeping the order of magnitude."""
    if L.n == 0:
        raise ValueError("empty Laplacian")
    return 2.0 * float(np.max(L.diag))


def deflated_matvec(L: LaplacianMatrix, defl: DeflationSet, x: np.ndarray) -> np.ndarray:
    """(L + delta V V^T) x."""
    y = L.L @ x
    if defl.c:
        y += defl.delta * (defl.V @ (defl.V.T @ x))
    return y


@dataclass
class ShiftedDeflatedOperator:
    """The trimmed (n-1)-space operator (L^ - sigma I) + (sigma/n) 1 1^T
    + delta V^ V^^T, applied implicitly by masking the trim index of L.
    """

    L: LaplacianMatrix
    trim: TrimContext
    sigma: float = 0.0
    defl: DeflationSet | None = None
    include_rank1: bool = True
    _V_hat: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.defl is not None and self.defl.c:
            self._V_hat = restrict_columns(self.defl.V, self.trim)

    @property
    def shape(self) -> tuple[int, int]:
        k = self.trim.n - 1
        return (k, k)

    @property
    def V_hat(self) -> np.ndarray | None:
        return self._V_hat

    def apply(self, x: np.ndarray) -> np.ndarray:
        return apply_trimmed(self, x)

    __call__ = apply

    def toarray(self) -> np.ndarray:
        """Dense assembly; test/small-scale use only."""
        n = self.trim.n
        Lhat = np.delete(np.delete(self.L.toarray(), self.trim.i, 0), self.trim.i, 1)
        A = Lhat - self.sigma * np.eye(n - 1)
        if self.include_rank1 and self.sigma != 0.0:
            A += (self.sigma / n) * np.ones((n - 1, n - 1))
        if self._V_hat is not None:
            A += self.defl.delta * (self._V_hat @ self._V_hat.T)
        return A


def apply_trimmed(op: ShiftedDeflatedOperator, x: np.ndarray) -> np.ndarray:
    """Apply the trimmed shifted deflated operator to an (n-1)-vector.

    The trimmed Laplacian matvec reuses the full CSR matrix: x is embedded
    with a zero at the trim index, multiplied, and the result row dropped.
    """
    trim, n = op.trim, op.trim.n
    if x.shape[0] != n - 1:
        raise ValueError(f"expected length {n - 1}, got {x.shape[0]}")
    x_full = embed(x, trim)
    y = np.delete(op.L.L @ x_full, trim.i)
    if op.sigma != 0.0:
        y -= op.sigma * x
        if op.include_rank1:
            y += (op.sigma / n) * x.sum()
    if op._V_hat is not None:
        y += op.defl.delta * (op._V_hat @ (op._V_hat.T @ x))
    return y
