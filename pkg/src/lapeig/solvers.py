"""Inexact inner solvers for the trimmed shifted deflated SPD systems.

Ships a pluggable preconditioner interface with identity, Jacobi, and an
SMW-deflated wrapper (the published combinatorial-multigrid preconditioner
is out of scope). PCG is written out so indefiniteness is detected and
reported; MINRES is delegated to scipy behind the same contract.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from .graph import LaplacianMatrix
from .operators import (
    DeflationSet,
    ShiftedDeflatedOperator,
    TrimContext,
    enlarge_solution,
    restrict,
    restrict_columns,
)

__all__ = [
    "SolveReport",
    "InnerOptions",
    "Preconditioner",
    "IdentityPreconditioner",
    "JacobiPreconditioner",
    "DeflatedPreconditioner",
    "build_jacobi",
    "smw_apply",
    "pcg",
    "minres",
    "solve_constrained",
    "safe_sigma",
]

logger = logging.getLogger(__name__)


@dataclass
class SolveReport:
    iterations: int
    relative_residual: float
    converged: bool
    breakdown: str | None = None


@dataclass
class InnerOptions:
    """Knobs for the inner solve; relative tolerance 1e-2 follows the
    modest-accuracy regime the outer iteration tolerates."""

    tol: float = 1e-2
    maxit: int = 500
    solver: str = "cg"  # "cg" | "minres"
    precond: str = "jacobi"  # "none" | "jacobi" | "deflated"
    include_rank1: bool | None = None  # None: auto (n <= 1e5)
    validate: bool = False


class Preconditioner:
    """Applies an approximate inverse; subclasses must be SPD."""

    def apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    __call__ = apply


class IdentityPreconditioner(Preconditioner):
    def apply(self, x: np.ndarray) -> np.ndarray:
        return x


class JacobiPreconditioner(Preconditioner):
    """Reciprocal diagonal of (L^ - sigma I)."""

    def __init__(self, inv_diag: np.ndarray):
        self.inv_diag = inv_diag

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.inv_diag * x


def build_jacobi(L: LaplacianMatrix, trim: TrimContext, sigma: float = 0.0) -> JacobiPreconditioner:
    """Jacobi preconditioner for the trimmed shifted operator.

    Raises when sigma reaches a diagonal entry (the shift is too large for
    the system to stay diagonally dominant; caller should clamp sigma).
    """
    d = restrict(L.diag, trim) - sigma
    if np.any(d <= 0):
        raise ValueError(
            f"sigma={sigma} makes the trimmed diagonal nonpositive "
            f"(min diag {restrict(L.diag, trim).min()})"
        )
    return JacobiPreconditioner(1.0 / d)


def smw_apply(
    M_base_apply: Callable[[np.ndarray], np.ndarray],
    V_hat: np.ndarray,
    delta: float,
    x: np.ndarray,
    core_factor=None,
) -> np.ndarray:
    """Apply (M + delta V^ V^^T)^{-1} via Sherman-Morrison-Woodbury:
    (I - delta M^{-1} V^ (I_c + delta V^^T M^{-1} V^)^{-1} V^^T) M^{-1}.

    ``core_factor`` is a cached Cholesky factorization of the c-by-c core;
    when omitted it is formed on the fly.
    """
    y = M_base_apply(x)
    c = V_hat.shape[1]
    if c == 0:
        return y
    if core_factor is None:
        MinvV = np.column_stack([M_base_apply(V_hat[:, j]) for j in range(c)])
        core = np.eye(c) + delta * (V_hat.T @ MinvV)
        try:
            core_factor = scipy.linalg.cho_factor(core)
        except np.linalg.LinAlgError as exc:
            raise ValueError("singular SMW core (degenerate deflation basis)") from exc
    t = scipy.linalg.cho_solve(core_factor, V_hat.T @ y)
    return y - delta * M_base_apply(V_hat @ t)


class DeflatedPreconditioner(Preconditioner):
    """SMW-deflated wrapper around a base preconditioner: the inverse of
    (M + delta V^ V^^T) with the c-by-c core factorized once and reused."""

    def __init__(self, base: Preconditioner, V_hat: np.ndarray, delta: float):
        self.base = base
        self.V_hat = V_hat
        self.delta = delta
        c = V_hat.shape[1]
        MinvV = np.column_stack([base.apply(V_hat[:, j]) for j in range(c)]) \
            if c else np.empty((V_hat.shape[0], 0))
        core = np.eye(c) + delta * (V_hat.T @ MinvV)
        try:
            self._core_factor = scipy.linalg.cho_factor(core) if c else None
        except np.linalg.LinAlgError as exc:
            raise ValueError("singular SMW core (degenerate deflation basis)") from exc

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.V_hat.shape[1] == 0:
            return self.base.apply(x)
        return smw_apply(self.base.apply, self.V_hat, self.delta, x,
                         core_factor=self._core_factor)


def pcg(
    apply_A: Callable[[np.ndarray], np.ndarray],
    rhs: np.ndarray,
    M: Preconditioner | None = None,
    tol: float = 1e-2,
    maxit: int = 500,
) -> tuple[np.ndarray, SolveReport]:
    """Preconditioned conjugate gradients with indefiniteness detection.

    Converges when ||rhs - A z|| <= tol * ||rhs||. A nonpositive curvature
    p^T A p signals an indefinite operator (bad shift) and is reported as a
    breakdown with the best iterate so far.
    """
    if M is None:
        M = IdentityPreconditioner()
    bnorm = np.linalg.norm(rhs)
    x = np.zeros_like(rhs)
    if bnorm == 0.0:
        return x, SolveReport(0, 0.0, True)
    r = rhs.copy()
    z = M.apply(r)
    p = z.copy()
    rz = r @ z
    for it in range(1, maxit + 1):
        Ap = apply_A(p)
        pAp = p @ Ap
        if pAp <= 0:
            return x, SolveReport(it - 1, np.linalg.norm(rhs - apply_A(x)) / bnorm,
                                  False, breakdown="indefinite operator")
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        rnorm = np.linalg.norm(r)
        if rnorm <= tol * bnorm:
            return x, SolveReport(it, rnorm / bnorm, True)
        z = M.apply(r)
        rz_new = r @ z
        beta = rz_new / rz
        rz = rz_new
        p = z + beta * p
    return x, SolveReport(maxit, np.linalg.norm(rhs - apply_A(x)) / bnorm, False)


def minres(
    apply_A: Callable[[np.ndarray], np.ndarray],
    rhs: np.ndarray,
    M: Preconditioner | None = None,
    tol: float = 1e-2,
    maxit: int = 500,
) -> tuple[np.ndarray, SolveReport]:
    """Minimal residual method; tolerates symmetric indefinite operators."""
    n = rhs.shape[0]
    bnorm = np.linalg.norm(rhs)
    if bnorm == 0.0:
        return np.zeros_like(rhs), SolveReport(0, 0.0, True)
    A = spla.LinearOperator((n, n), matvec=apply_A, dtype=np.float64)
    Mop = None
    if M is not None and not isinstance(M, IdentityPreconditioner):
        Mop = spla.LinearOperator((n, n), matvec=M.apply, dtype=np.float64)
    count = {"it": 0}

    def cb(_xk):
        count["it"] += 1

    x, _info = spla.minres(A, rhs, rtol=tol, maxiter=maxit, M=Mop, callback=cb)
    relres = np.linalg.norm(rhs - apply_A(x)) / bnorm
    return x, SolveReport(count["it"], relres, relres <= tol)


def safe_sigma(L: LaplacianMatrix, trim: TrimContext, sigma: float) -> float:
    """Clamp the shift so the trimmed diagonal stays safely positive."""
    cap = 0.95 * float(np.min(restrict(L.diag, trim)))
    return max(0.0, min(sigma, cap))


def solve_constrained(
    L: LaplacianMatrix,
    defl: DeflationSet,
    sigma: float,
    trim: TrimContext,
    r: np.ndarray,
    opts: InnerOptions | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Inexactly solve (L + delta V V^T - sigma I) z = r with ones @ z = 0.

    The right-hand side is restricted at the trim index, the trimmed shifted
    deflated system is solved iteratively, and the solution is enlarged back
    to n-space orthogonally to the kernel. An r with a nontrivial component
    along ones is projected first (with a warning): that component makes the
    system inconsistent.
    """
    if opts is None:
        opts = InnerOptions()
    n = L.n
    rnorm = np.linalg.norm(r)
    if rnorm == 0.0:
        return np.zeros(n), SolveReport(0, 0.0, True)

    ones_component = r.sum()
    if abs(ones_component) > max(1e-8 * rnorm, 1e-13 * np.sqrt(n)):
        logger.warning(
            "right-hand side has kernel component %.3e (||r||=%.3e); projecting",
            ones_component, rnorm,
        )
        if opts.validate:
            raise ValueError("rhs not orthogonal to ones in validation mode")
    # Project unconditionally: removing the (inconsistent) kernel component
    # costs one pass and keeps rounding drift out of the trimmed solve.
    r = r - ones_component / n

    sigma_eff = safe_sigma(L, trim, sigma)
    clamped = sigma_eff < sigma
    include_rank1 = opts.include_rank1
    if include_rank1 is None:
        include_rank1 = n <= 100_000

    op = ShiftedDeflatedOperator(L=L, trim=trim, sigma=sigma_eff, defl=defl,
                                 include_rank1=include_rank1)
    r_hat = restrict(r, trim)

    M: Preconditioner | None = None
    if opts.precond != "none":
        M = build_jacobi(L, trim, sigma_eff)
        if defl.c and opts.precond in ("jacobi", "deflated"):
            M = DeflatedPreconditioner(M, restrict_columns(defl.V, trim), defl.delta)

    solver = opts.solver
    if clamped and solver == "cg":
        solver = "minres"

    if solver == "cg":
        z_hat, report = pcg(op.apply, r_hat, M, tol=opts.tol, maxit=opts.maxit)
        if report.breakdown is not None:
            z_hat, report = minres(op.apply, r_hat, M, tol=opts.tol, maxit=opts.maxit)
    elif solver == "minres":
        z_hat, report = minres(op.apply, r_hat, M, tol=opts.tol, maxit=opts.maxit)
    else:
        raise ValueError(f"unknown solver {opts.solver!r}")

    return enlarge_solution(z_hat, trim), report
