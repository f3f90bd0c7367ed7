"""Edge-tree BFS: core/edge-tree graph decomposition and a Graph500-style BFS harness."""

import os
import warnings

# numba fixes its thread pool size at import; allow up to 8 workers even on small
# machines so thread-count invariance can be exercised anywhere.
if "numba" not in __import__("sys").modules:
    os.environ.setdefault("NUMBA_NUM_THREADS", str(max(8, os.cpu_count() or 1)))
warnings.filterwarnings("ignore", message=".*TBB threading layer.*")

from etbfs.graph import (  # noqa: E402
    UNSET,
    UNREACHED,
    BfsTree,
    CsrGraph,
    GraphError,
    RawEdgeList,
    VertexType,
    build_csr,
    derive_levels,
)
from etbfs.kronecker import KroneckerParams, generate_kronecker  # noqa: E402

__all__ = [
    "UNSET",
    "UNREACHED",
    "BfsTree",
    "CsrGraph",
    "GraphError",
    "KroneckerParams",
    "RawEdgeList",
    "VertexType",
    "build_csr",
    "derive_levels",
    "generate_kronecker",
]
