"""Command-line front end.

Subcommands: ``solve`` (run the eigensolver on an edge-list file),
``verify`` (recheck a result file), ``bench`` (compare against the dense
baselines), ``components`` (connected-component stats), ``trim-ablation``
(cost comparison across trim policies), and ``gen`` (test-fixture graphs).

Exit codes: 0 converged, 1 usage/IO error, 2 partial convergence.
"""

from __future__ import annotations

import argparse
import json
import struct
import sys
import time

import numpy as np

from . import generate
from .engine import DEFAULT_SEED, EigenResult, SiraConfig, isira_solve
from .graph import (
    EdgeListParseError,
    EdgeListValidationError,
    Graph,
    build_graph,
    connected_components,
    laplacian,
    largest_component,
    parse_edge_list,
)
from .oracle import (
    _MAX_DENSE,
    baseline_nullspace_deflated,
    baseline_perturbed,
    verify_eigresult,
)
from .solvers import InnerOptions

VECTOR_MAGIC = b"LAPEIGV1"  # 8 bytes; header is magic + uint32 n + uint32 d

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--num-eigs", type=int, default=6, help="eigenpairs to compute")
    p.add_argument("--tol", type=float, default=1e-8, help="outer residual tolerance")
    p.add_argument("--max-subspace", type=int, default=30, help="max subspace dimension m")
    p.add_argument("--restart-size", type=int, default=None, help="restart size q")
    p.add_argument("--inner-tol", type=float, default=1e-2, help="inner relative residual tolerance")
    p.add_argument("--inner-maxit", type=int, default=500, help="inner iteration cap")
    p.add_argument("--solver", choices=("cg", "minres"), default="cg")
    p.add_argument("--precond", choices=("none", "jacobi", "deflated"), default="jacobi")
    p.add_argument("--trim", default="auto",
                   help="'auto' (max degree), 'min-degree', or a fixed index")
    p.add_argument("--delta", default="auto", help="'auto' (2*max degree) or a value")
    p.add_argument("--sigma0", type=float, default=0.0, help="initial shift")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--output", default=None, help="write the JSON run record here")
    p.add_argument("--history", default=None, help="write per-iteration CSV history here")
    p.add_argument("--vectors", default=None, help="write eigenvectors (binary f64) here")
    p.add_argument("--validate", action="store_true", help="enable invariant assertions")


def _config_from_args(args) -> SiraConfig:
    if args.trim == "auto":
        trim_policy: int | str = "max_degree"
    elif args.trim == "min-degree":
        trim_policy = "min_degree"
    else:
        trim_policy = int(args.trim)
    delta = None if args.delta == "auto" else float(args.delta)
    inner = InnerOptions(tol=args.inner_tol, maxit=args.inner_maxit,
                         solver=args.solver, precond=args.precond,
                         validate=args.validate)
    return SiraConfig(d=args.num_eigs, m=args.max_subspace, q=args.restart_size,
                      eps=args.tol, inner=inner, trim_policy=trim_policy,
                      delta=delta, sigma0=args.sigma0, seed=args.seed,
                      validate=args.validate)


def _load_graph(path: str) -> tuple[Graph, np.ndarray, int]:
    """Parse, build, and reduce to the largest component.

    Returns (graph, original-vertex map, original vertex count)."""
    with open(path, "rb") as fh:
        el = parse_edge_list(fh)
    g0 = build_graph(el)
    g, vmap = largest_component(g0)
    return g, vmap, g0.n


def _record(cfg: SiraConfig, g: Graph, vmap: np.ndarray, n_original: int,
            result: EigenResult, residuals: np.ndarray, timings: dict) -> dict:
    return {
        "config": {
            "d": cfg.d, "m": cfg.m, "q": cfg.resolved_q(), "k0": cfg.k0,
            "eps": cfg.eps, "inner_tol": cfg.inner.tol,
            "inner_maxit": cfg.inner.maxit, "solver": cfg.inner.solver,
            "precond": cfg.inner.precond, "trim_policy": str(cfg.trim_policy),
            "delta": cfg.delta, "sigma0": cfg.sigma0, "seed": cfg.seed,
        },
        "graph": {
            "n": g.n, "nnz_laplacian": int(g.nnz + g.n),
            "n_original": n_original,
            "component_map_identity": bool(g.n == n_original),
        },
        "eigenvalues": [float(x) for x in result.lambdas],
        "residuals": [float(x) for x in residuals],
        "converged": result.converged,
        "message": result.message,
        "history": [
            {"sweep": h.sweep, "outer": h.outer, "k": h.k, "theta1": h.theta1,
             "resnorm": h.resnorm, "sigma": h.sigma,
             "inner_iterations": h.inner_iterations}
            for h in result.history
        ],
        "timings": timings,
    }


def _emit(record: dict, output: str | None) -> None:
    text = json.dumps(record, sort_keys=True, indent=2)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _write_history_csv(result: EigenResult, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sweep,outer,k,theta1,resnorm,sigma,inner_iterations\n")
        for h in result.history:
            fh.write(f"{h.sweep},{h.outer},{h.k},{h.theta1:.17g},"
                     f"{h.resnorm:.17g},{h.sigma:.17g},{h.inner_iterations}\n")


def _write_vectors(result: EigenResult, path: str) -> None:
    """Binary little-endian f64 column-major with a 16-byte header."""
    n, d = result.vectors.shape
    with open(path, "wb") as fh:
        fh.write(VECTOR_MAGIC)
        fh.write(struct.pack("<II", n, d))
        fh.write(np.asfortranarray(result.vectors, dtype="<f8").tobytes(order="F"))


def read_vectors(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != VECTOR_MAGIC:
            raise ValueError(f"bad vector-file magic {magic!r}")
        n, d = struct.unpack("<II", fh.read(8))
        data = np.frombuffer(fh.read(), dtype="<f8")
    return data.reshape((n, d), order="F")


def cmd_solve(args) -> int:
    cfg = _config_from_args(args)
    t0 = time.perf_counter()
    g, vmap, n_original = _load_graph(args.input)
    L = laplacian(g)
    t_build = time.perf_counter() - t0

    t1 = time.perf_counter()
    result = isira_solve(L, cfg)
    t_solve = time.perf_counter() - t1

    residuals = np.array([
        np.linalg.norm(L.L @ result.vectors[:, j] - result.lambdas[j] * result.vectors[:, j])
        for j in range(result.d)
    ])
    record = _record(cfg, g, vmap, n_original, result, residuals,
                     {"build_seconds": t_build, "solve_seconds": t_solve})
    if g.n != n_original:
        record["graph"]["component_vertices"] = [int(x) for x in vmap]
    _emit(record, args.output)
    if args.history:
        _write_history_csv(result, args.history)
    if args.vectors:
        _write_vectors(result, args.vectors)
    return EXIT_OK if result.converged else EXIT_PARTIAL


def cmd_verify(args) -> int:
    g, _vmap, _n0 = _load_graph(args.input)
    L = laplacian(g)
    with open(args.result, encoding="utf-8") as fh:
        record = json.load(fh)
    lambdas = np.asarray(record["eigenvalues"])
    if args.vectors:
        vectors = read_vectors(args.vectors)
        report = verify_eigresult(L, lambdas, vectors, eps=args.tol)
        out = {
            "residuals": [float(x) for x in report.residuals],
            "orthogonality_defect": report.orthogonality_defect,
            "kernel_defect": report.kernel_defect,
            "max_eigenvalue_error": report.max_eigenvalue_error,
            "skipped_eigenvalues": report.skipped_eigenvalues,
            "ok": report.ok,
        }
    else:
        if L.n > _MAX_DENSE:
            print("error: eigenvalue-only verification needs the dense oracle "
                  f"(n <= {_MAX_DENSE}); pass --vectors for residual checks",
                  file=sys.stderr)
            return EXIT_USAGE
        from .oracle import dense_eigh
        w, _ = dense_eigh(L.toarray())
        expect = w[1: len(lambdas) + 1]
        errs = np.abs(np.sort(lambdas) - expect)
        out = {
            "max_eigenvalue_error": float(np.max(errs)) if errs.size else 0.0,
            "ok": bool(np.all(errs <= max(1e-6, 10 * args.tol))),
        }
    print(json.dumps(out, sort_keys=True, indent=2))
    return EXIT_OK if out["ok"] else EXIT_PARTIAL


def cmd_bench(args) -> int:
    cfg = _config_from_args(args)
    g, vmap, n_original = _load_graph(args.input)
    L = laplacian(g)
    d = cfg.d
    rows = []

    t0 = time.perf_counter()
    result = isira_solve(L, cfg)
    rows.append({"code": "isira", "n": L.n, "nnz": L.nnz,
                 "eigenvalues": [float(x) for x in result.lambdas],
                 "seconds": time.perf_counter() - t0})

    if L.n <= _MAX_DENSE:
        t0 = time.perf_counter()
        ev = baseline_perturbed(L, tau=args.tau, d=d)
        rows.append({"code": "perturbed", "n": L.n, "nnz": L.nnz,
                     "eigenvalues": [float(x) for x in ev],
                     "seconds": time.perf_counter() - t0})
        t0 = time.perf_counter()
        ev = baseline_nullspace_deflated(L, d=d)
        rows.append({"code": "nullspace-deflated", "n": L.n, "nnz": L.nnz,
                     "eigenvalues": [float(x) for x in ev],
                     "seconds": time.perf_counter() - t0})
    else:
        print(f"notice: n={L.n} exceeds the dense-baseline guard "
              f"({_MAX_DENSE}); baselines skipped", file=sys.stderr)

    _emit({"rows": rows}, args.output)
    return EXIT_OK if result.converged else EXIT_PARTIAL


def cmd_trim_ablation(args) -> int:
    cfg = _config_from_args(args)
    g, vmap, n_original = _load_graph(args.input)
    L = laplacian(g)
    rows = []
    ok = True
    for name, policy in (("min-degree", "min_degree"), ("vertex-0", 0),
                         ("max-degree", "max_degree")):
        t0 = time.perf_counter()
        res = isira_solve(L, SiraConfig(
            d=cfg.d, m=cfg.m, q=cfg.q, eps=cfg.eps, inner=cfg.inner,
            trim_policy=policy, delta=cfg.delta, sigma0=cfg.sigma0, seed=cfg.seed))
        rows.append({
            "policy": name,
            "outer_iterations": len(res.history),
            "inner_iterations_total": sum(h.inner_iterations for h in res.history),
            "eigenvalues": [float(x) for x in res.lambdas],
            "seconds": time.perf_counter() - t0,
        })
        ok = ok and res.converged
    _emit({"rows": rows}, args.output)
    return EXIT_OK if ok else EXIT_PARTIAL


def cmd_components(args) -> int:
    with open(args.input, "rb") as fh:
        el = parse_edge_list(fh)
    g = build_graph(el)
    comp = connected_components(g)
    counts = sorted(comp.sizes.values(), reverse=True)
    out = {
        "n": g.n,
        "n_components": comp.n_components,
        "largest_size": counts[0] if counts else 0,
        "sizes_descending": counts[:50],
    }
    print(json.dumps(out, sort_keys=True, indent=2))
    return EXIT_OK


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "path":
        g = generate.path_graph(args.n)
    elif kind == "cycle":
        g = generate.cycle_graph(args.n)
    elif kind == "star":
        g = generate.star_graph(args.n)
    elif kind == "complete":
        g = generate.complete_graph(args.n)
    elif kind == "grid":
        side = int(round(args.n ** 0.5))
        g = generate.grid_graph(side, side)
    elif kind == "er":
        el = generate.sparse_erdos_renyi_edges(args.n, args.avg_degree, args.seed)
        g = build_graph(el)
    else:
        raise ValueError(kind)
    A = g.adjacency.tocoo()
    lines = [f"% lapeig fixture: {kind} n={g.n}"]
    for i, j in zip(A.row, A.col):
        if i < j:
            lines.append(f"{i + 1} {j + 1}")
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lapeig",
        description="Smallest positive eigenpairs of graph Laplacians "
                    "(no factorization, no diagonal regularization)",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute eigenpairs of an edge-list graph")
    p.add_argument("input", help="edge-list file")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="recheck a result record")
    p.add_argument("input", help="edge-list file")
    p.add_argument("--result", required=True, help="JSON record from solve")
    p.add_argument("--vectors", default=None, help="binary eigenvector file")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="compare against dense baselines")
    p.add_argument("input", help="edge-list file")
    p.add_argument("--tau", type=float, default=1e-8,
                   help="diagonal perturbation for the perturbed baseline")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("trim-ablation", help="cost comparison across trim policies")
    p.add_argument("input", help="edge-list file")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_trim_ablation)

    p = sub.add_parser("components", help="connected-component statistics")
    p.add_argument("input", help="edge-list file")
    p.set_defaults(func=cmd_components)

    p = sub.add_parser("gen", help="emit a fixture graph as an edge list")
    p.add_argument("kind", choices=("path", "cycle", "star", "complete", "grid", "er"))
    p.add_argument("n", type=int)
    p.add_argument("--avg-degree", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_gen)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EdgeListParseError, EdgeListValidationError, FileNotFoundError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
