"""lapeig: smallest positive eigenpairs of graph Laplacians.

Computes the d smallest positive eigenvalues and eigenvectors of a sparse
graph Laplacian without ever factorizing or explicitly regularizing the
singular matrix, by combining singularity trimming, eigenvalue deflation,
shift-invert, and an inexact inner-outer residual Arnoldi iteration.
"""

from .engine import EigenResult, SiraConfig, isira_solve
from .graph import (
    EdgeList,
    Graph,
    LaplacianMatrix,
    build_graph,
    connected_components,
    laplacian,
    largest_component,
    parse_edge_list,
)
from .operators import DeflationSet, TrimContext, choose_delta, select_trim_index
from .solvers import InnerOptions, solve_constrained

__version__ = "0.1.0"

__all__ = [
    "EdgeList",
    "Graph",
    "LaplacianMatrix",
    "parse_edge_list",
    "build_graph",
    "connected_components",
    "largest_component",
    "laplacian",
    "TrimContext",
    "DeflationSet",
    "select_trim_index",
    "choose_delta",
    "InnerOptions",
    "solve_constrained",
    "SiraConfig",
    "EigenResult",
    "isira_solve",
    "__version__",
]
