"""Outer eigensolver: inexact shift-invert residual Arnoldi iteration with
singularity trimming, eigenvalue deflation, subspace restart, eigenvector
purging, and shift updates.

The search subspace is kept orthonormal and orthogonal to both the kernel
vector and all converged eigenvectors; each expansion vector comes from one
inexact solve of the trimmed shifted deflated linear system.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .graph import LaplacianMatrix
from .operators import (
    DeflationSet,
    TrimContext,
    choose_delta,
    deflated_matvec,
    restrict,
    select_trim_index,
)
from .solvers import InnerOptions, solve_constrained

__all__ = [
    "SiraConfig",
    "SearchSubspace",
    "RitzDecomposition",
    "EigenResult",
    "IterationRecord",
    "SubspaceBreakdown",
    "init_subspace",
    "ritz_decompose",
    "compute_residual",
    "expand",
    "restart",
    "purge",
    "update_shift",
    "isira_solve",
]

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20170301


class SubspaceBreakdown(RuntimeError):
    """Expansion vector vanished after orthogonalization (stagnation)."""


@dataclass
class SiraConfig:
    """Outer-iteration parameters; requires 1 <= d <= q < m."""

    d: int
    m: int = 30
    q: int | None = None  # default max(d + 5, 15), capped below m
    k0: int = 1
    eps: float = 1e-8
    inner: InnerOptions = field(default_factory=InnerOptions)
    trim_policy: int | str = "max_degree"
    delta: float | None = None  # None: 2 * max(diag)
    sigma0: float = 0.0
    seed: int = DEFAULT_SEED
    max_outer: int | None = None  # None: 100 * d * m
    validate: bool = False

    def resolved_q(self) -> int:
        q = self.q if self.q is not None else max(self.d + 5, 15)
        return min(max(q, self.d), self.m - 1)

    def check(self) -> None:
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if self.k0 < 1:
            raise ValueError("k0 must be >= 1")
        if self.m < 2:
            raise ValueError("m must be >= 2")
        if not self.d <= self.resolved_q() < self.m:
            raise ValueError("need 1 <= d <= q < m")


@dataclass
class SearchSubspace:
    """Orthonormal basis U, image W = (L + delta V V^T) U, and Rayleigh
    quotient H = U^T W."""

    U: np.ndarray
    W: np.ndarray
    H: np.ndarray

    @property
    def k(self) -> int:
        return int(self.U.shape[1])


@dataclass(frozen=True)
class RitzDecomposition:
    """Eigendecomposition of H, ascending, with a deterministic sign fix."""

    thetas: np.ndarray
    S: np.ndarray


@dataclass
class IterationRecord:
    sweep: int  # index j of the eigenpair being hunted (1-based)
    outer: int  # global outer-iteration counter
    k: int  # subspace dimension at extraction time
    theta1: float
    resnorm: float
    sigma: float
    inner_iterations: int


@dataclass
class EigenResult:
    lambdas: np.ndarray
    vectors: np.ndarray
    history: list[IterationRecord]
    converged: bool
    message: str = ""

    @property
    def d(self) -> int:
        return int(self.lambdas.size)


def _orthonormalize_against(z: np.ndarray, bases: list[np.ndarray]) -> tuple[np.ndarray, float, float]:
    """Modified Gram-Schmidt against each basis, plus one re-orthogonalization
    pass. Returns (unit vector or garbage, norm before, norm after)."""
    before = np.linalg.norm(z)
    for _ in range(2):  # MGS + DGKS repass
        for B in bases:
            if B.ndim == 1:
                z = z - B * (B @ z)
            elif B.shape[1]:
                z = z - B @ (B.T @ z)
    after = np.linalg.norm(z)
    if after > 0:
        z = z / after
    return z, before, after


def _random_unit(rng: np.random.Generator, n: int, bases: list[np.ndarray]) -> np.ndarray:
    for _ in range(20):
        z, _, after = _orthonormalize_against(rng.standard_normal(n), bases)
        if after > 1e-8 * np.sqrt(n):
            return z
    raise SubspaceBreakdown("could not draw a vector outside the current subspace")


def init_subspace(
    L: LaplacianMatrix,
    k0: int,
    seed: int | np.random.Generator = DEFAULT_SEED,
    defl: DeflationSet | None = None,
) -> SearchSubspace:
    """Seeded random orthonormal start basis orthogonal to the kernel vector
    (and to any converged eigenvectors)."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = L.n
    if defl is None:
        defl = DeflationSet.empty(n)
    ones_unit = np.full(n, 1.0 / np.sqrt(n))
    cols = []
    for _ in range(k0):
        bases = [ones_unit, defl.V] + ([np.column_stack(cols)] if cols else [])
        cols.append(_random_unit(rng, n, bases))
    U = np.column_stack(cols)
    W = np.column_stack([deflated_matvec(L, defl, U[:, j]) for j in range(k0)])
    H = U.T @ W
    H = 0.5 * (H + H.T)
    return SearchSubspace(U=U, W=W, H=H)


def ritz_decompose(H: np.ndarray) -> RitzDecomposition:
    """Full symmetric eigendecomposition of the small projected matrix,
    ascending eigenvalues, largest-magnitude entry of each vector positive."""
    thetas, S = np.linalg.eigh(0.5 * (H + H.T))
    for j in range(S.shape[1]):
        lead = np.argmax(np.abs(S[:, j]))
        if S[lead, j] < 0:
            S[:, j] = -S[:, j]
    return RitzDecomposition(thetas=thetas, S=S)


def compute_residual(ss: SearchSubspace, rd: RitzDecomposition) -> tuple[np.ndarray, float, np.ndarray]:
    """Residual r = W s1 - theta1 U s1 of the smallest Ritz pair; returns
    (r, theta1, Ritz vector U s1)."""
    s1 = rd.S[:, 0]
    theta1 = float(rd.thetas[0])
    y1 = ss.U @ s1
    r = ss.W @ s1 - theta1 * y1
    return r, theta1, y1


def expand(
    ss: SearchSubspace,
    z: np.ndarray,
    defl: DeflationSet,
    L: LaplacianMatrix,
) -> SearchSubspace:
    """Orthonormalize z against the kernel vector, converged eigenvectors,
    and the current basis; append it and extend W and H by one column/row
    (one deflated matvec)."""
    n = L.n
    ones_unit = np.full(n, 1.0 / np.sqrt(n))
    u, before, after = _orthonormalize_against(z, [ones_unit, defl.V, ss.U])
    if before == 0.0 or after < 1e-12 * before:
        raise SubspaceBreakdown("expansion vector lies in the current subspace")
    w = deflated_matvec(L, defl, u)
    hcol = ss.U.T @ w
    hdiag = u @ w
    U = np.column_stack([ss.U, u])
    W = np.column_stack([ss.W, w])
    k = ss.k
    H = np.empty((k + 1, k + 1))
    H[:k, :k] = ss.H
    H[:k, k] = hcol
    H[k, :k] = hcol
    H[k, k] = hdiag
    return SearchSubspace(U=U, W=W, H=H)


def restart(ss: SearchSubspace, rd: RitzDecomposition, q: int) -> SearchSubspace:
    """Shrink an m-dimensional subspace to its q smallest Ritz directions."""
    Sq = rd.S[:, :q]
    return SearchSubspace(U=ss.U @ Sq, W=ss.W @ Sq, H=np.diag(rd.thetas[:q].copy()))


def purge(ss: SearchSubspace, rd: RitzDecomposition) -> SearchSubspace:
    """Drop the converged (smallest) Ritz direction from the subspace."""
    Sk = rd.S[:, 1:]
    return SearchSubspace(U=ss.U @ Sk, W=ss.W @ Sk, H=np.diag(rd.thetas[1:].copy()))


def update_shift(theta2: float, trimmed_diag_min: float) -> float:
    """Move the shift toward the next Ritz value, under the safety cap that
    keeps the trimmed shifted diagonal positive."""
    return max(0.0, min(0.95 * theta2, 0.95 * trimmed_diag_min))


def _refresh(ss: SearchSubspace, L: LaplacianMatrix, defl: DeflationSet) -> SearchSubspace:
    """Recompute W and H from scratch (used when the subspace saturates the
    deflated complement and roundoff is all that is left)."""
    W = np.column_stack([deflated_matvec(L, defl, ss.U[:, j]) for j in range(ss.k)])
    H = ss.U.T @ W
    return SearchSubspace(U=ss.U.copy(), W=W, H=0.5 * (H + H.T))


def isira_solve(L: LaplacianMatrix, cfg: SiraConfig) -> EigenResult:
    """Compute the d smallest positive eigenpairs of a connected graph
    Laplacian without factorizing or regularizing it.

    Follows the integrated inexact shift-invert residual Arnoldi scheme:
    hunt one eigenpair at a time, expanding the subspace with inexact
    solutions of the trimmed shifted deflated system; deflate and purge each
    converged pair, then move the shift toward the next Ritz value.
    """
    cfg.check()
    n = L.n
    if cfg.d > n - 1:
        raise ValueError(f"a connected graph on {n} vertices has only {n - 1} positive eigenvalues")

    delta = cfg.delta if cfg.delta is not None else choose_delta(L)
    trim = select_trim_index(L, cfg.trim_policy)
    trimmed_diag_min = float(np.min(restrict(L.diag, trim)))
    defl = DeflationSet.empty(n, delta=delta)
    rng = np.random.default_rng(cfg.seed)
    q = cfg.resolved_q()
    max_outer = cfg.max_outer if cfg.max_outer is not None else 100 * cfg.d * cfg.m

    ss = init_subspace(L, cfg.k0, rng, defl)
    sigma = cfg.sigma0
    history: list[IterationRecord] = []
    lambdas: list[float] = []
    vectors: list[np.ndarray] = []
    outer = 0
    last_inner = 0

    def partial(msg: str) -> EigenResult:
        lam = np.array(lambdas)
        V = np.column_stack(vectors) if vectors else np.empty((n, 0))
        return EigenResult(lambdas=lam, vectors=V, history=history,
                           converged=False, message=msg)

    j = 1
    while j <= cfg.d:
        max_dim = n - 1 - defl.c  # dimension orthogonal to ones and V
        m_eff = min(cfg.m, max_dim)
        q_eff = min(q, max(m_eff - 1, 1))
        refreshes = 0
        expansions = 0

        while True:
            outer += 1
            if outer > max_outer:
                return partial(f"outer iteration cap {max_outer} reached with "
                               f"{len(lambdas)}/{cfg.d} pairs converged")

            rd = ritz_decompose(ss.H)
            r, theta1, y1 = compute_residual(ss, rd)
            resnorm = float(np.linalg.norm(r))
            history.append(IterationRecord(sweep=j, outer=outer, k=ss.k,
                                           theta1=theta1, resnorm=resnorm,
                                           sigma=sigma, inner_iterations=last_inner))
            last_inner = 0
            if cfg.validate:
                assert abs(r.sum()) <= 1e-10 * max(resnorm, 1.0) * np.sqrt(n)
                gram = ss.U.T @ ss.U
                assert np.max(np.abs(gram - np.eye(ss.k))) <= 1e-8

            # A pair is only accepted after at least one expansion in this
            # sweep: a purged subspace can retain an exact eigenpair of a
            # larger eigenvalue while the smallest remaining one (e.g. a
            # further copy of a multiple eigenvalue) is unrepresented.
            trusted = expansions > 0 or ss.k >= max_dim
            if resnorm < cfg.eps and theta1 > 0 and trusted:
                # Re-verify against the original, undeflated Laplacian before
                # accepting; deflation could mask contamination at tolerance.
                v = y1 / np.linalg.norm(y1)
                res_orig = float(np.linalg.norm(L.L @ v - theta1 * v))
                if res_orig <= cfg.eps:
                    lambdas.append(theta1)
                    vectors.append(v)
                    defl = defl.appended(theta1, v)
                    if j == cfg.d:
                        break
                    if ss.k >= 2:
                        theta2 = float(rd.thetas[1])
                        ss = purge(ss, rd)
                        # W and H were built with the old deflation set; fold
                        # in the rank-one update for the new converged vector.
                        proj = v @ ss.U
                        ss.W += delta * np.outer(v, proj)
                        ss.H += delta * np.outer(proj, proj)
                        sigma = update_shift(theta2, trimmed_diag_min)
                    else:
                        ss = init_subspace(L, cfg.k0, rng, defl)
                    break
                logger.debug("deflated residual %.2e passed but original residual "
                             "%.2e did not; continuing", resnorm, res_orig)

            if ss.k >= max_dim:
                # Subspace spans the whole deflated complement; the Ritz
                # problem is exact up to roundoff. Refresh once, then reseed.
                if refreshes == 0:
                    ss = _refresh(ss, L, defl)
                    refreshes += 1
                    continue
                ss = init_subspace(L, cfg.k0, rng, defl)
                refreshes = 0
                continue

            if ss.k == m_eff and q_eff < m_eff:
                ss = restart(ss, rd, q_eff)

            z, report = solve_constrained(L, defl, sigma, trim, r, cfg.inner)
            last_inner = report.iterations
            if report.breakdown is not None and report.iterations == 0:
                logger.debug("inner breakdown (%s); expanding with random vector",
                             report.breakdown)
                z = rng.standard_normal(n)
            try:
                ss = expand(ss, z, defl, L)
            except SubspaceBreakdown:
                ones_unit = np.full(n, 1.0 / np.sqrt(n))
                u = _random_unit(rng, n, [ones_unit, defl.V, ss.U])
                ss = expand(ss, u, defl, L)
            expansions += 1
        j += 1

    lam = np.array(lambdas)
    order = np.argsort(lam, kind="stable")
    V = np.column_stack(vectors)[:, order]
    return EigenResult(lambdas=lam[order], vectors=V, history=history,
                       converged=True)
