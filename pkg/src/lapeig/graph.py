"""Edge-list ingestion, graph assembly, and Laplacian construction.

Input files follow the common network-collection convention: UTF-8 text,
``%`` or ``#`` comment lines, whitespace-separated ``u v [w]`` data lines.
Vertex ids may be 0- or 1-based; they are remapped to dense 0-based ids.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, TextIO

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

__all__ = [
    "EdgeListParseError",
    "EdgeListValidationError",
    "EdgeList",
    "Graph",
    "LaplacianMatrix",
    "ComponentLabeling",
    "parse_edge_list",
    "build_graph",
    "connected_components",
    "largest_component",
    "laplacian",
    "write_matrix_market",
]


class EdgeListParseError(ValueError):
    """Malformed token in an edge-list file; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class EdgeListValidationError(ValueError):
    """Structurally valid input that violates a graph invariant."""


@dataclass(frozen=True)
class EdgeList:
    """Normalized undirected edge list: no self-loops, no duplicate pairs,
    strictly positive weights, dense 0-based vertex ids."""

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    n: int

    def __post_init__(self):
        if np.any(self.u == self.v):
            raise EdgeListValidationError("self-loop in normalized edge list")
        if np.any(self.w <= 0):
            raise EdgeListValidationError("nonpositive edge weight")

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], n: int | None = None) -> "EdgeList":
        """Build a normalized EdgeList from ``(u, v)`` or ``(u, v, w)`` tuples.

        Self-loops are dropped; duplicate undirected pairs keep the first
        weight. Ids are taken as 0-based; ``n`` defaults to max id + 1.
        """
        us, vs, ws = [], [], []
        seen: set[tuple[int, int]] = set()
        for e in edges:
            a, b = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            if key in seen:
                continue
            seen.add(key)
            us.append(key[0])
            vs.append(key[1])
            ws.append(w)
        u = np.asarray(us, dtype=np.int64)
        v = np.asarray(vs, dtype=np.int64)
        w = np.asarray(ws, dtype=np.float64)
        if n is None:
            n = int(max(u.max(initial=-1), v.max(initial=-1)) + 1) if u.size else 0
        elif u.size and int(max(u.max(), v.max())) >= n:
            raise EdgeListValidationError("vertex id exceeds declared count")
        return cls(u=u, v=v, w=w, n=int(n))

    @property
    def m(self) -> int:
        return int(self.u.size)


def parse_edge_list(text: str | bytes | TextIO | BinaryIO) -> EdgeList:
    """Parse an edge-list byte/character stream into a normalized EdgeList.

    Lines starting with ``%`` or ``#`` are comments. Data lines carry
    ``u v [w]``; columns past the weight (e.g. timestamps) are ignored.
    Ids are detected as 1-based when no id 0 appears, then remapped to
    dense 0-based ids. Self-loops are dropped and duplicate undirected
    pairs keep the first weight.
    """
    if isinstance(text, bytes):
        stream: TextIO = io.StringIO(text.decode("utf-8"))
    elif isinstance(text, str):
        stream = io.StringIO(text)
    elif isinstance(text, io.TextIOBase):
        stream = text
    else:  # binary file object
        stream = io.TextIOWrapper(text, encoding="utf-8")

    us, vs, ws = [], [], []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line[0] in "%#":
            continue
        tok = line.split()
        if len(tok) < 2:
            raise EdgeListParseError(lineno, f"expected 'u v [w]', got {line!r}")
        try:
            a = int(tok[0])
            b = int(tok[1])
        except ValueError:
            raise EdgeListParseError(lineno, f"non-integer vertex id in {line!r}") from None
        w = 1.0
        if len(tok) >= 3:
            try:
                w = float(tok[2])
            except ValueError:
                raise EdgeListParseError(lineno, f"non-numeric weight in {line!r}") from None
        if w <= 0:
            raise EdgeListValidationError(f"line {lineno}: nonpositive weight {w}")
        us.append(a)
        vs.append(b)
        ws.append(w)

    if not us:
        return EdgeList(u=np.empty(0, np.int64), v=np.empty(0, np.int64),
                        w=np.empty(0, np.float64), n=0)

    u = np.asarray(us, dtype=np.int64)
    v = np.asarray(vs, dtype=np.int64)
    w = np.asarray(ws, dtype=np.float64)
    if u.min() < 0 or v.min() < 0:
        raise EdgeListValidationError("negative vertex id")

    # 1-based (KONECT convention) unless an id 0 is present.
    if min(u.min(), v.min()) > 0:
        u = u - 1
        v = v - 1

    # Remap to dense 0-based ids in sorted original order.
    ids = np.unique(np.concatenate([u, v]))
    lut = {int(orig): k for k, orig in enumerate(ids)}
    u = np.array([lut[int(x)] for x in u], dtype=np.int64)
    v = np.array([lut[int(x)] for x in v], dtype=np.int64)

    return EdgeList.from_edges(zip(u, v, w), n=int(ids.size))


@dataclass(frozen=True)
class Graph:
    """Simple undirected weighted graph in CSR adjacency form."""

    n: int
    adjacency: sp.csr_matrix
    degrees: np.ndarray = field(repr=False)

    @property
    def nnz(self) -> int:
        return int(self.adjacency.nnz)


def build_graph(el: EdgeList) -> Graph:
    """Assemble the symmetric adjacency matrix and weighted degree vector.

    Isolated declared vertices are retained with degree 0.
    """
    n = el.n
    rows = np.concatenate([el.u, el.v])
    cols = np.concatenate([el.v, el.u])
    vals = np.concatenate([el.w, el.w])
    A = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    A.sum_duplicates()
    degrees = np.asarray(A.sum(axis=1)).ravel()
    return Graph(n=n, adjacency=A, degrees=degrees)


@dataclass(frozen=True)
class ComponentLabeling:
    """Connected-component partition; component ids are ordered by the
    smallest member vertex."""

    labels: np.ndarray
    sizes: dict[int, int]

    @property
    def n_components(self) -> int:
        return len(self.sizes)


def connected_components(g: Graph) -> ComponentLabeling:
    """Label connected components deterministically."""
    ncomp, raw = csgraph.connected_components(g.adjacency, directed=False)
    # Canonical relabeling: component ids in order of smallest member vertex.
    first_seen = np.full(ncomp, g.n, dtype=np.int64)
    for vtx in range(g.n - 1, -1, -1):
        first_seen[raw[vtx]] = vtx
    order = np.argsort(first_seen, kind="stable")
    remap = np.empty(ncomp, dtype=np.int64)
    remap[order] = np.arange(ncomp)
    labels = remap[raw]
    counts = np.bincount(labels, minlength=ncomp)
    sizes = {int(c): int(counts[c]) for c in range(ncomp)}
    return ComponentLabeling(labels=labels, sizes=sizes)


def largest_component(g: Graph) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the largest connected component.

    Returns the subgraph and a vertex map: position k holds the original
    vertex id of subgraph vertex k. Ties go to the smallest component id,
    i.e. the component containing the smallest vertex.
    """
    if g.n == 0:
        raise EdgeListValidationError("empty graph has no components")
    comp = connected_components(g)
    counts = np.array([comp.sizes[c] for c in range(comp.n_components)])
    best = int(np.argmax(counts))  # argmax takes the smallest id on ties
    keep = np.flatnonzero(comp.labels == best)
    A = g.adjacency[keep][:, keep].tocsr()
    degrees = np.asarray(A.sum(axis=1)).ravel()
    return Graph(n=keep.size, adjacency=A, degrees=degrees), keep


@dataclass(frozen=True)
class LaplacianMatrix:
    """Graph Laplacian L = D - A in CSR form with cached diagonal."""

    n: int
    L: sp.csr_matrix
    diag: np.ndarray = field(repr=False)

    @property
    def nnz(self) -> int:
        return int(self.L.nnz)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.L @ x

    def toarray(self) -> np.ndarray:
        return self.L.toarray()


def laplacian(g: Graph, validate: bool = False) -> LaplacianMatrix:
    """Assemble L = D - A. With ``validate=True``, rejects disconnected input."""
    if g.n == 0:
        raise EdgeListValidationError("empty graph has no Laplacian")
    if validate:
        comp = connected_components(g)
        if comp.n_components != 1:
            raise EdgeListValidationError(
                f"graph has {comp.n_components} components; "
                "extract one with largest_component() first"
            )
    L = (sp.diags(g.degrees) - g.adjacency).tocsr()
    L.sum_duplicates()
    L.sort_indices()
    return LaplacianMatrix(n=g.n, L=L, diag=g.degrees.copy())


def write_matrix_market(lap: LaplacianMatrix, path) -> None:
    """Dump the Laplacian in MatrixMarket coordinate symmetric format."""
    lower = sp.tril(lap.L).tocoo()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("%%MatrixMarket matrix coordinate real symmetric\n")
        fh.write(f"{lap.n} {lap.n} {lower.nnz}\n")
        for i, j, val in zip(lower.row, lower.col, lower.data):
            fh.write(f"{i + 1} {j + 1} {val:.17g}\n")
