import numpy as np
import pytest

from lapeig import SiraConfig, isira_solve, laplacian
from lapeig.generate import complete_graph, cycle_graph, grid_graph, path_graph
from lapeig.oracle import (
    baseline_nullspace_deflated,
    baseline_perturbed,
    dense_eigh,
    dense_solve,
    verify_eigresult,
)
from lapeig.solvers import pcg


class TestDenseEigh:
    def test_diagonal(self):
        w, Q = dense_eigh(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(w, [1.0, 2.0, 3.0])
        assert np.allclose(np.abs(Q), np.eye(3)[:, [1, 2, 0]])

    def test_path3(self):
        w, _ = dense_eigh(laplacian(path_graph(3)).toarray())
        assert np.allclose(w, [0.0, 1.0, 3.0], atol=1e-12)

    def test_complete3(self):
        w, _ = dense_eigh(laplacian(complete_graph(3)).toarray())
        assert np.allclose(w, [0.0, 3.0, 3.0], atol=1e-12)

    def test_random_reconstruction(self):
        rng = np.random.default_rng(31)
        for n in (5, 20, 60, 100):
            B = rng.standard_normal((n, n))
            A = 0.5 * (B + B.T)
            w, Q = dense_eigh(A)
            fro = np.linalg.norm(A)
            assert np.linalg.norm(Q @ np.diag(w) @ Q.T - A) <= 1e-9 * fro
            assert np.max(np.abs(Q.T @ Q - np.eye(n))) <= 1e-10
            assert np.all(np.diff(w) >= -1e-12 * fro)

    def test_size_guard(self):
        with pytest.raises(ValueError):
            dense_eigh(np.eye(2001))


class TestDenseSolve:
    def test_two_by_two(self):
        x = dense_solve(np.array([[2.0, 1.0], [1.0, 3.0]]), np.array([3.0, 4.0]))
        assert np.allclose(x, [1.0, 1.0])

    def test_pivoting_required(self):
        A = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert np.allclose(dense_solve(A, np.array([2.0, 5.0])), [5.0, 2.0])

    def test_singular_raises(self):
        with pytest.raises(ValueError):
            dense_solve(np.ones((3, 3)), np.ones(3))

    def test_matches_iterative_solver(self):
        rng = np.random.default_rng(32)
        B = rng.standard_normal((15, 15))
        A = B @ B.T + 15 * np.eye(15)
        b = rng.standard_normal(15)
        x_dense = dense_solve(A, b)
        x_cg, rep = pcg(lambda v: A @ v, b, tol=1e-12, maxit=200)
        assert rep.converged
        assert np.linalg.norm(x_dense - x_cg) <= 1e-8 * np.linalg.norm(x_dense)


class TestVerify:
    def test_exact_pairs_pass(self):
        L = laplacian(grid_graph(4, 4))
        w, Q = dense_eigh(L.toarray())
        rep = verify_eigresult(L, w[1:4], Q[:, 1:4])
        assert rep.ok
        assert np.max(rep.residuals) <= 1e-10
        assert rep.max_eigenvalue_error <= 1e-10
        assert not rep.skipped_eigenvalues

    def test_perturbed_pairs_fail_residual(self):
        L = laplacian(grid_graph(4, 4))
        w, Q = dense_eigh(L.toarray())
        V = Q[:, 1:3].copy()
        V[0, 0] += 1e-3
        rep = verify_eigresult(L, w[1:3], V)
        assert not rep.ok

    def test_skipped_eigenvalue_detected(self):
        # Reporting eigenpairs 2 and 3 while claiming d=2 skips eigenpair 1.
        L = laplacian(path_graph(5))
        w, Q = dense_eigh(L.toarray())
        rep = verify_eigresult(L, w[2:4], Q[:, 2:4])
        assert not rep.ok
        assert rep.skipped_eigenvalues

    def test_solver_output_passes(self):
        L = laplacian(cycle_graph(12))
        res = isira_solve(L, SiraConfig(d=4))
        rep = verify_eigresult(L, res.lambdas, res.vectors)
        assert rep.ok
        assert rep.orthogonality_defect <= 1e-8
        assert rep.kernel_defect <= 1e-8


class TestBaselines:
    def test_perturbed_path3(self):
        L = laplacian(path_graph(3))
        vals = baseline_perturbed(L, d=2)
        assert np.allclose(vals, [1.0, 3.0], atol=1e-6)

    def test_nullspace_deflated_path3(self):
        L = laplacian(path_graph(3))
        vals = baseline_nullspace_deflated(L, d=2)
        assert np.allclose(vals, [1.0, 3.0], atol=1e-8)

    def test_baselines_agree_on_grid(self):
        L = laplacian(grid_graph(5, 5))
        a = baseline_perturbed(L, d=5)
        b = baseline_nullspace_deflated(L, d=5)
        assert np.max(np.abs(a - b)) <= 1e-6
