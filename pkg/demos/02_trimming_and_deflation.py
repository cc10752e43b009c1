"""How the solver handles a singular matrix without regularizing it.

Two ideas do the work:

1. Trimming. Deleting one row/column i of L leaves a nonsingular M-matrix
   L_hat. Solving L_hat z_hat = r_hat and re-centering the enlarged vector
   gives the unique solution of L z = r that is orthogonal to the kernel.
   No epsilon is ever added to the diagonal.

2. Deflation. Once an eigenpair (lambda, v) has converged, L + delta v v^T
   moves lambda up to lambda + delta and leaves every other eigenvalue
   alone, so the next-smallest eigenvalue becomes reachable.

Run:  python3 demos/02_trimming_and_deflation.py
"""

import numpy as np

from lapeig import DeflationSet, choose_delta, laplacian
from lapeig.generate import path_graph
from lapeig.operators import enlarge_solution, restrict, select_trim_index
from lapeig.oracle import dense_eigh, dense_solve


def main():
    L = laplacian(path_graph(5))
    dense = L.toarray()
    print("Laplacian of the 5-vertex path:")
    print(dense.astype(int))
    w, Q = dense_eigh(dense)
    print("spectrum:", np.round(w, 6))

    # --- trimming -------------------------------------------------------
    trim = select_trim_index(L, "max_degree")
    print(f"\ntrim index (max degree): {trim.i}")
    trimmed = np.delete(np.delete(dense, trim.i, 0), trim.i, 1)
    wt, _ = dense_eigh(trimmed)
    print("trimmed matrix min eigenvalue:", wt[0], "(positive definite)")

    r = np.array([1.0, 0.5, 0.0, -0.5, -1.0])  # orthogonal to ones
    z_hat = dense_solve(trimmed, restrict(r, trim))
    z = enlarge_solution(z_hat, trim)
    print("||L z - r|| =", np.linalg.norm(dense @ z - r))
    print("ones @ z    =", z.sum(), "(kernel-orthogonal)")

    # --- deflation ------------------------------------------------------
    delta = choose_delta(L)
    defl = DeflationSet(lambdas=w[1:2], V=Q[:, 1:2], delta=delta)
    shifted, _ = dense_eigh(dense + delta * (defl.V @ defl.V.T))
    print(f"\ndelta = 2 * max diag = {delta}")
    print("spectrum after deflating lambda_1:", np.round(shifted, 6))
    print(f"lambda_1 moved {w[1]:.6f} -> {w[1] + delta:.6f}; "
          "everything else is unchanged")


if __name__ == "__main__":
    main()
