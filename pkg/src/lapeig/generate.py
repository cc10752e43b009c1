"""Small graph generators for tests, demos, and the CLI fixture subcommand."""

from __future__ import annotations

import numpy as np

from .graph import EdgeList, Graph, build_graph, connected_components

__all__ = [
    "path_graph",
    "cycle_graph",
    "star_graph",
    "complete_graph",
    "grid_graph",
    "erdos_renyi",
    "sparse_erdos_renyi_edges",
]


def path_graph(k: int) -> Graph:
    """Path on k vertices."""
    return build_graph(EdgeList.from_edges([(i, i + 1) for i in range(k - 1)], n=k))


def cycle_graph(k: int) -> Graph:
    """Cycle on k vertices; spectrum 2 - 2 cos(2 pi j / k)."""
    edges = [(i, (i + 1) % k) for i in range(k)]
    return build_graph(EdgeList.from_edges(edges, n=k))


def star_graph(k: int) -> Graph:
    """Star on k vertices: center 0 plus k - 1 leaves."""
    return build_graph(EdgeList.from_edges([(0, i) for i in range(1, k)], n=k))


def complete_graph(k: int) -> Graph:
    """Complete graph on k vertices; positive eigenvalues all equal k."""
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    return build_graph(EdgeList.from_edges(edges, n=k))


def grid_graph(rows: int, cols: int) -> Graph:
    """4-neighbor grid on rows x cols vertices."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return build_graph(EdgeList.from_edges(edges, n=rows * cols))


def erdos_renyi(n: int, p: float, seed: int, connected: bool = True) -> Graph:
    """G(n, p) random graph; with ``connected=True`` redraws until the graph
    is connected (intended for n up to a few hundred)."""
    rng = np.random.default_rng(seed)
    for _ in range(1000):
        mask = rng.random((n, n)) < p
        iu = np.triu_indices(n, k=1)
        sel = mask[iu]
        u, v = iu[0][sel], iu[1][sel]
        g = build_graph(EdgeList.from_edges(zip(u, v), n=n))
        if not connected or connected_components(g).n_components == 1:
            return g
    raise RuntimeError(f"failed to draw a connected G({n}, {p}) graph")


def sparse_erdos_renyi_edges(n: int, avg_degree: float, seed: int) -> EdgeList:
    """Large sparse random graph via edge sampling (approximately G(n, m)
    with m = n * avg_degree / 2). The result is usually disconnected at low
    degree; callers should take the largest component."""
    rng = np.random.default_rng(seed)
    m = int(n * avg_degree / 2)
    u = rng.integers(0, n, size=int(m * 1.1))
    v = rng.integers(0, n, size=int(m * 1.1))
    keep = u != v
    u, v = u[keep], v[keep]
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    pairs = np.unique(np.stack([lo, hi], axis=1), axis=0)[:m]
    return EdgeList(u=pairs[:, 0].astype(np.int64), v=pairs[:, 1].astype(np.int64),
                    w=np.ones(pairs.shape[0]), n=n)
